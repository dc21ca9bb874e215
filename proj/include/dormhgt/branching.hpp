#ifndef DORMHGT_BRANCHING_HPP
#define DORMHGT_BRANCHING_HPP

#include <cstdint>
#include <utility>

#include "dormhgt/params.hpp"

namespace dormhgt {

// 2x2 mean matrix of the two-type (active, dormant) branching process that
// approximates a rare trait-1 mutant in a trait-2 resident population.
// Row 1: active individual's mean offspring flux into (active, dormant);
// row 2: dormant individual's. Requires lambda2 > mu.
struct MeanMatrix {
  double a11, a12;
  double a21, a22;
};

// Growth rate of a trait-2 mutant in a trait-1 resident at equilibrium:
// lambda2 - mu - (C - tau) bar_n1a. Requires lambda1 > mu.
double lambda_hat(const ModelParams& params);

MeanMatrix mean_matrix(const ModelParams& params);

// Largest eigenvalue of the mean matrix, from the characteristic quadratic.
// Internally cross-checked against the expanded closed form (1e-10 relative).
double lambda_tilde(const ModelParams& params);

// The closed form evaluated verbatim; exposed for tests.
double lambda_tilde_closed_form(const ModelParams& params);

// Extinction probability of the single-type mutant-2 process with birth rate
// lambda2 + tau bar_n1a and death rate mu + C bar_n1a per individual:
// min(1, death/birth). Requires lambda1 > mu; throws AnalysisError when
// |lambda_hat| < kCriticalTol (critical case).
double q2(const ModelParams& params);

// First coordinate of the minimal fixed point in [0,1]^2 of the two-type
// offspring generating system, by monotone iteration from (0,0); returns 1
// when lambda_tilde <= 0. Requires lambda2 > mu; critical case throws.
double q1(const ModelParams& params);

// Both coordinates of the q1 fixed point (extinction prob from one active /
// one dormant founder).
std::pair<double, double> q1_pair(const ModelParams& params);

struct PiProportions {
  double pi_active;
  double pi_dormant;
  bool degenerate;  // p = 0: pi = (1, 0), strict positivity fails
};

// Left eigenvector of the mean matrix for lambda_tilde, normalized to sum 1.
// Requires lambda2 > mu and lambda_tilde > 0.
PiProportions pi_proportions(const ModelParams& params);

struct FitnessReport {
  // trait 2 invading trait 1 (defined when lambda1 > mu)
  bool direction_2into1_defined = false;
  double lambda_hat = 0;
  double q2 = 1;
  bool critical_hat = false;
  // trait 1 invading trait 2 (defined when lambda2 > mu)
  bool direction_1into2_defined = false;
  double lambda_tilde = 0;
  double q1 = 1;
  bool critical_tilde = false;
  bool pi_defined = false;
  double pi_active = 0;
  double pi_dormant = 0;
  bool pi_degenerate = false;
};

// Fills in whatever applies; never throws for unfit directions (flags them).
FitnessReport fitness_report(const ModelParams& params);

struct BranchingMcResult {
  std::uint64_t trials = 0;
  std::uint64_t extinct = 0;
  std::uint64_t survived = 0;
  std::uint64_t censored = 0;  // event cap hit while not supercritical
  double fraction_extinct = 0;
  double wilson_low = 0;   // 95% Wilson interval for the extinct fraction
  double wilson_high = 0;
  double std_error = 0;
};

// Simulates the exact branching process (embedded jump chain; extinction is
// a jump-chain property) from one active founder. trait selects which
// process: 2 = single-type mutant-2, 1 = two-type mutant-1. A run counts as
// survived once the total size reaches survival_threshold, or if event_cap
// elapses while the process is supercritical.
BranchingMcResult branching_mc(const ModelParams& params, int trait,
                               std::uint64_t trials, std::uint64_t event_cap,
                               std::uint64_t seed,
                               std::uint64_t survival_threshold = 10000,
                               int threads = 1);

// z-score Wilson interval for k successes out of n.
std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n,
                                          double z);

}  // namespace dormhgt

#endif
