#ifndef DORMHGT_STABILITY_HPP
#define DORMHGT_STABILITY_HPP

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "dormhgt/equilibria.hpp"
#include "dormhgt/params.hpp"

namespace dormhgt {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Jacobi matrix of the limiting system at an arbitrary state; entry (3,2) is
// identically zero.
Mat3 jacobian(const ModelParams& params, const State3& state);

double det3(const Mat3& m);
double trace3(const Mat3& m);

// Roots of the characteristic polynomial (closed-form cubic, one Newton
// polish step each), descending by real part.
std::array<std::complex<double>, 3> eigenvalues3(const Mat3& m);

enum class StabilityLabel {
  AsymptoticallyStable,
  Unstable,
  DegenerateCoincidesWithOrigin,
  IndeterminateLocal,  // coexistence under the stable chain; see Remark below
  Boundary,            // an eigenvalue real part within kEigenTol of zero
};

const char* to_string(StabilityLabel label);

struct EquilibriumClassification {
  std::string name;  // "origin", "trait2", "trait1", "coexistence"
  State3 point{0, 0, 0};
  StabilityLabel label;
  std::array<std::complex<double>, 3> eigenvalues{};
  double trace = 0;
  double det = 0;
  bool negative_coordinate = false;  // trait2 point with lambda2 < mu
};

// Eigenvalue-based labels for (0,0,0), (0,0,(lambda2-mu)/C),
// (bar_n1a,bar_n1d,0) and the coexistence point when it exists. The
// coexistence point under the stable chain is reported IndeterminateLocal
// with its trace/determinant, never called stable, since its local stability
// is not settled by eigenvalue signs alone in the non-hyperbolic case.
std::vector<EquilibriumClassification> classify_equilibria(
    const ModelParams& params);

enum class RegimeLabel {
  I,    // founder control
  II,   // fixation of 1 despite lambda2 > lambda1
  IIp,  // fixation of 1, lambda1 > lambda2 > mu
  IIpp, // fixation of 1, lambda2 < mu
  III,  // stable coexistence, lambda2 > mu
  IIIp, // stable coexistence, lambda2 < mu
  IV,   // fixation of 2, lambda2 > lambda1
  IVp,  // fixation of 2 despite lambda1 > lambda2
  StableCoexistence,          // dormancy-free labels
  Fixation1,
  Fixation2,
  FounderControlNoCoexistence,
  Boundary,
  ResidentUnfit,
};

const char* to_string(RegimeLabel label);

// Full-model classification (tau > 0, p > 0); routes to the special cases
// when tau = 0 or p = 0. lambda1 <= mu yields ResidentUnfit.
RegimeLabel regime(const ModelParams& params);

// p = 0 classification per the four planar chains around
// (C/tau)(lambda1-lambda2).
RegimeLabel dormancy_free_regime(const ModelParams& params);

// tau = 0 classification: fixation-1 iff
// lambda2 - lambda1 < p (lambda2 - mu) sigma / (kappa mu + sigma),
// fixation-2 under the reverse strict inequality. Requires both traits fit.
RegimeLabel hgt_free_regime(const ModelParams& params);

// a*lambda1 + b*lambda2 = c in the (lambda1, lambda2) plane; both critical
// lines pass through (mu, mu).
struct CriticalLine {
  double a, b, c;
  double slope;  // d lambda2 / d lambda1
};

struct CriticalLines {
  // Where the invasion fitness of trait 2 vanishes (lambda1 - mu = M); the
  // line drawn orange in the landscape figures. Slope is negative iff
  // tau > C and the line degenerates to lambda2 = mu at tau = C.
  CriticalLine trait2_boundary;
  // Where the invasion fitness of trait 1 vanishes (lambda2 - mu = M); the
  // blue line. Slope is always positive.
  CriticalLine trait1_boundary;
};

// Requires tau > 0 and a nondegenerate denominator; in the degenerate case
// C p sigma = tau (kappa mu + sigma) both lines coincide with
// lambda1 = lambda2 and an AnalysisError is thrown.
CriticalLines critical_lines(const ModelParams& params);

struct RegimeGrid {
  std::vector<double> lambda1;  // grid axis values
  std::vector<double> lambda2;
  std::vector<RegimeLabel> labels;  // row-major over (lambda1, lambda2)
};

RegimeGrid regime_map(const ModelParams& fixed, double l1_min, double l1_max,
                      int n1, double l2_min, double l2_max, int n2);

}  // namespace dormhgt

#endif
