#ifndef DORMHGT_EXPERIMENTS_HPP
#define DORMHGT_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dormhgt/branching.hpp"
#include "dormhgt/ode.hpp"
#include "dormhgt/ssa.hpp"

namespace dormhgt {

enum class Direction { TwoIntoOne, OneIntoTwo };

Direction direction_from_string(const std::string& name);
const char* to_string(Direction d);

enum class TrialKind { Extinction, FixationMutant, Coexistence, Censored };

const char* to_string(TrialKind kind);

struct TrialOutcome {
  TrialKind kind = TrialKind::Censored;
  double t = 0;
  CountState state;
  std::uint64_t events = 0;
};

struct TrialSettings {
  double beta = 0.05;
  double t_cap = 1e3;
  std::uint64_t event_cap = 1000000000ULL;
};

// One stochastic invasion run: resident at round(K * equilibrium), one active
// mutant. Stopping conditions: mutant extinction, the mutant's fixation set,
// and the coexistence set when the coexistence equilibrium exists (checked
// first). Boundary or critical parameters are rejected up front.
TrialOutcome invasion_trial(const ModelParams& params, double K,
                            Direction direction, std::uint64_t seed,
                            const TrialSettings& settings = {});

struct StudyRow {
  double K = 0;
  std::uint64_t trials = 0;
  std::uint64_t extinct = 0;
  std::uint64_t fixation = 0;
  std::uint64_t coexistence = 0;
  std::uint64_t censored = 0;
  // empirical invasion probability over non-censored trials + 95% Wilson
  double p_success = 0;
  double wilson_low = 0;
  double wilson_high = 0;
  double theory_success = 0;  // 1 - q
  // hitting times among successes, divided by log K
  double mean_t_over_logk = 0;
  double se_t_over_logk = 0;
  double median_t_over_logk = 0;
  // extinction times among failures, divided by log K
  double mean_t0_over_logk = 0;
  double se_t0_over_logk = 0;
  // theoretical constants: time to the coexistence set and to fixation
  double theory_coex_const = 0;  // 1/lambda_hat (2into1), 1/lambda_tilde (1into2)
  double theory_fix_const = 0;   // 1/lhat - 1/ltilde resp. 1/ltilde - 1/lhat
};

struct StudySummary {
  Direction direction = Direction::TwoIntoOne;
  double beta = 0.05;
  std::uint64_t base_seed = 0;
  std::vector<StudyRow> rows;
  std::vector<std::vector<TrialOutcome>> raw;  // per K, in trial order
};

StudySummary invasion_study(const ModelParams& params,
                            const std::vector<double>& k_list,
                            std::uint64_t trials, Direction direction,
                            double beta, std::uint64_t base_seed,
                            int threads = 1, const TrialSettings& settings = {},
                            bool keep_raw = false);

struct ProportionCheck {
  std::uint64_t trials = 0;
  std::uint64_t reached = 0;   // trait-1 total reached floor(eps K)
  std::uint64_t within = 0;    // |active fraction - pi_1a| < delta at that time
  double fraction_within = 0;  // within / reached
  double pi_active = 0;
  std::vector<double> active_fractions;  // one per reaching trial
};

// Kesten-Stigum composition check for direction 1into2: among trials whose
// trait-1 total first reaches floor(eps K), the active fraction at the
// hitting time should concentrate near pi_1a.
ProportionCheck proportion_check(const ModelParams& params, double K,
                                 std::uint64_t trials, double eps, double delta,
                                 std::uint64_t base_seed, int threads = 1,
                                 const TrialSettings& settings = {});

struct MeanFieldCheck {
  double K = 0;
  double horizon = 0;
  std::vector<double> sup_deviation;  // one per repetition
  double median_deviation = 0;
};

// Sup-norm distance over [0, horizon] between the scaled SSA path and the
// ODE solution started from the same (rounded) initial condition. init is in
// densities; by default the trait-1 resident equilibrium.
MeanFieldCheck meanfield_check(const ModelParams& params, double K,
                               double horizon, std::uint64_t reps,
                               std::uint64_t base_seed,
                               const State3* init = nullptr, int threads = 1,
                               double sample_dt = 0.01);

// Deterministic helper: runs fn(i) for i in [0, n) over the given number of
// threads; results must be written to per-index slots by the caller.
void parallel_for(std::uint64_t n, int threads,
                  const std::function<void(std::uint64_t)>& fn);

}  // namespace dormhgt

#endif
