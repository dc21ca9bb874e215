#ifndef DORMHGT_EQUILIBRIA_HPP
#define DORMHGT_EQUILIBRIA_HPP

#include <array>
#include <optional>

#include "dormhgt/params.hpp"

namespace dormhgt {

using State3 = std::array<double, 3>;  // (n1a, n1d, n2)

// Which strict inequality chain holds around the shared middle expression M:
//   Unstable:  lambda2 - mu > M > lambda1 - mu   (founder control)
//   Stable:    lambda2 - mu < M < lambda1 - mu   (stable coexistence)
// Boundary is reported when either comparison is within kBoundaryTol.
enum class CoexistenceKind { None, Unstable, Stable, Boundary };

// M = (C p sigma / (tau (kappa mu + sigma))) (lambda2 - mu)
//     + (C / tau) (lambda1 - lambda2).
// Requires tau > 0; throws AnalysisError for the HGT-free case.
double middle_expression(const ModelParams& params);

// ((lambda2 - mu) v 0) / C
double trait2_equilibrium(const ModelParams& params);

// Signed value (lambda2 - mu) / C, an equilibrium of the flow even when
// negative.
double trait2_equilibrium_signed(const ModelParams& params);

// (bar_n1a, bar_n1d); both zero when lambda1 <= mu.
std::array<double, 2> trait1_equilibrium(const ModelParams& params);

CoexistenceKind coexistence_kind(const ModelParams& params);

// The unique coordinatewise positive coexistence equilibrium, present iff one
// of the two strict chains holds. Throws AnalysisError when the denominator
// C p sigma - tau (kappa mu + sigma) is degenerate (relative tol 1e-12).
std::optional<State3> coexistence_equilibrium(const ModelParams& params);

struct EquilibriumReport {
  double bar_n1a = 0;
  double bar_n1d = 0;
  double bar_n2 = 0;
  double tilde_n2 = 0;  // signed (lambda2 - mu)/C
  bool coexistence_exists = false;
  State3 coexistence{0, 0, 0};
  CoexistenceKind which_condition = CoexistenceKind::None;
};

EquilibriumReport equilibrium_report(const ModelParams& params);

// Coexistence equilibrium of the dormancy-free planar system, valid for
// p = 0: (n1, n2), present iff lambda2-mu < (C/tau)(lambda1-lambda2) <
// lambda1-mu.
std::optional<std::array<double, 2>> coexistence_dormancy_free(
    const ModelParams& params);

}  // namespace dormhgt

#endif
