#ifndef DORMHGT_SSA_HPP
#define DORMHGT_SSA_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dormhgt/params.hpp"
#include "dormhgt/rng.hpp"

namespace dormhgt {

// Integer counts of the individual-based chain at carrying capacity K.
struct CountState {
  std::int64_t n1a = 0;
  std::int64_t n1d = 0;
  std::int64_t n2 = 0;
};

// The eight reaction channels of the generator, in this fixed order.
enum class EventChannel : int {
  Birth1a = 0,       // (+1, 0, 0)   rate lambda1 * x1a
  Death1a = 1,       // (-1, 0, 0)   rate (mu + (1-p)(C/K)(x1a+x2)) * x1a
  Switch1aTo1d = 2,  // (-1, +1, 0)  rate p (C/K)(x1a+x2) * x1a
  Transfer1aTo2 = 3, // (-1, 0, +1)  rate (tau/K) * x1a * x2
  Death1d = 4,       // (0, -1, 0)   rate kappa mu * x1d
  Resuscitate = 5,   // (+1, -1, 0)  rate sigma * x1d
  Birth2 = 6,        // (0, 0, +1)   rate lambda2 * x2
  Death2 = 7,        // (0, 0, -1)   rate (mu + (C/K)(x1a+x2)) * x2
};

const char* to_string(EventChannel channel);

using Rates8 = std::array<double, 8>;

// Competition uses the (x1a + x2) factor of the generator, self-pairs
// included; the pair-counting convention differs from (x-1) forms by O(1/K).
Rates8 event_rates(const ModelParams& params, const CountState& state,
                   double K);

// One exact direct-method event. Throws AnalysisError at total rate zero
// (absorbing state).
struct StepResult {
  double wait;
  EventChannel channel;
  CountState next;
};
StepResult step(Rng& rng, const ModelParams& params, const CountState& state,
                double K);

// Closed l-infinity box around a scaled target, with exact-zero requirements
// on the coordinates listed in must_be_zero.
struct SetTarget {
  std::array<double, 3> center{0, 0, 0};  // densities
  double beta = 0.05;
  std::array<bool, 3> must_be_zero{false, false, false};
};

enum class StopReason {
  Absorbed,        // total rate hit zero (state (0,0,0))
  MutantExtinct,   // T_0^i
  LevelReached,    // T_x^i: trait total == floor(x K)
  HitTrait1Set,    // S_beta^1
  HitTrait2Set,    // S_beta^2
  HitCoexSet,      // S_beta^co
  TimeCap,
  EventCap,
};

const char* to_string(StopReason reason);

struct StopSpec {
  std::optional<int> mutant_extinction_trait;           // 1 or 2
  std::optional<std::pair<int, double>> level;          // (trait, x)
  std::optional<SetTarget> trait1_set;                  // S_beta^1
  std::optional<SetTarget> trait2_set;                  // S_beta^2
  std::optional<SetTarget> coex_set;                    // S_beta^co
  bool check_coex_before_trait2 = true;                 // T_Sco < T_S2 order
  double t_cap = std::numeric_limits<double>::infinity();
  std::uint64_t event_cap = 1000000000ULL;

  bool has_terminating_condition() const {
    return mutant_extinction_trait || level || trait1_set || trait2_set ||
           coex_set || t_cap < std::numeric_limits<double>::infinity() ||
           event_cap < std::numeric_limits<std::uint64_t>::max();
  }
};

struct SsaOutcome {
  StopReason stop = StopReason::Absorbed;
  double t = 0;
  CountState state;
  std::uint64_t events = 0;
};

struct CountTrajectory {
  std::vector<double> times;
  std::vector<CountState> states;
};

struct SsaRun {
  SsaOutcome outcome;
  CountTrajectory trajectory;  // empty unless sample_dt > 0
};

// Advances the chain from init until the first satisfied stopping condition.
// With sample_dt > 0 the trajectory is recorded on the fixed grid
// {0, dt, 2dt, ...} by piecewise-constant interpolation, plus the terminal
// state. Identical seed and inputs give a bitwise-identical event sequence.
SsaRun run(std::uint64_t seed, const ModelParams& params, double K,
           const CountState& init, const StopSpec& stop,
           double sample_dt = 0);

}  // namespace dormhgt

#endif
