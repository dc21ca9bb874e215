#include "dormhgt/ssa.hpp"

#include <cmath>

namespace dormhgt {

const char* to_string(EventChannel channel) {
  switch (channel) {
    case EventChannel::Birth1a: return "birth-1a";
    case EventChannel::Death1a: return "death-1a";
    case EventChannel::Switch1aTo1d: return "switch-1a-1d";
    case EventChannel::Transfer1aTo2: return "transfer-1a-2";
    case EventChannel::Death1d: return "death-1d";
    case EventChannel::Resuscitate: return "resuscitate-1d-1a";
    case EventChannel::Birth2: return "birth-2";
    case EventChannel::Death2: return "death-2";
  }
  return "?";
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Absorbed: return "absorbed";
    case StopReason::MutantExtinct: return "mutant-extinct";
    case StopReason::LevelReached: return "level-reached";
    case StopReason::HitTrait1Set: return "hit-trait1-set";
    case StopReason::HitTrait2Set: return "hit-trait2-set";
    case StopReason::HitCoexSet: return "hit-coex-set";
    case StopReason::TimeCap: return "time-cap";
    case StopReason::EventCap: return "event-cap";
  }
  return "?";
}

namespace {

// Premultiplied per-K constants of the generator.
struct RateConstants {
  double lambda1, lambda2, mu, p, sigma, kmu, cK, tauK;
  explicit RateConstants(const ModelParams& q, double K)
      : lambda1(q.lambda1),
        lambda2(q.lambda2),
        mu(q.mu),
        p(q.p),
        sigma(q.sigma),
        kmu(q.kappa * q.mu),
        cK(q.C / K),
        tauK(q.tau / K) {}
};

inline Rates8 compute_rates(const RateConstants& c, const CountState& s) {
  const double x1a = static_cast<double>(s.n1a);
  const double x1d = static_cast<double>(s.n1d);
  const double x2 = static_cast<double>(s.n2);
  const double comp = c.cK * (x1a + x2);
  return {c.lambda1 * x1a,
          (c.mu + (1.0 - c.p) * comp) * x1a,
          c.p * comp * x1a,
          c.tauK * x1a * x2,
          c.kmu * x1d,
          c.sigma * x1d,
          c.lambda2 * x2,
          (c.mu + comp) * x2};
}

inline void apply_channel(CountState& s, int channel) {
  switch (channel) {
    case 0: ++s.n1a; break;
    case 1: --s.n1a; break;
    case 2: --s.n1a; ++s.n1d; break;
    case 3: --s.n1a; ++s.n2; break;
    case 4: --s.n1d; break;
    case 5: --s.n1d; ++s.n1a; break;
    case 6: ++s.n2; break;
    case 7: --s.n2; break;
  }
}

inline bool in_box(const CountState& s, double inv_k, const SetTarget& box) {
  const std::array<double, 3> x{s.n1a * inv_k, s.n1d * inv_k, s.n2 * inv_k};
  const std::array<std::int64_t, 3> counts{s.n1a, s.n1d, s.n2};
  for (int i = 0; i < 3; ++i) {
    if (box.must_be_zero[i]) {
      if (counts[i] != 0) return false;
    } else if (std::abs(x[i] - box.center[i]) > box.beta) {
      return false;
    }
  }
  return true;
}

}  // namespace

Rates8 event_rates(const ModelParams& q, const CountState& s, double K) {
  return compute_rates(RateConstants(q, K), s);
}

StepResult step(Rng& rng, const ModelParams& q, const CountState& s,
                double K) {
  const Rates8 r = event_rates(q, s, K);
  double total = 0;
  for (double v : r) total += v;
  if (!(total > 0)) throw AnalysisError("step: total rate is zero (absorbed)");
  StepResult out;
  out.wait = rng.exponential(total);
  double u = rng.uniform() * total;
  int ch = 0;
  for (; ch < 7; ++ch) {
    if (u < r[ch]) break;
    u -= r[ch];
  }
  out.channel = static_cast<EventChannel>(ch);
  out.next = s;
  apply_channel(out.next, ch);
  return out;
}

SsaRun run(std::uint64_t seed, const ModelParams& q, double K,
           const CountState& init, const StopSpec& stop, double sample_dt) {
  validate(q);
  if (!(K > 0)) throw std::invalid_argument("K must be positive");
  if (init.n1a < 0 || init.n1d < 0 || init.n2 < 0)
    throw std::invalid_argument("counts must be nonnegative");
  if (!stop.has_terminating_condition())
    throw std::invalid_argument("stop spec has no terminating condition");

  Rng rng(seed);
  const RateConstants consts(q, K);
  const double inv_k = 1.0 / K;
  SsaRun out;
  CountState s = init;
  double t = 0;
  std::uint64_t events = 0;

  const bool sampling = sample_dt > 0;
  double next_sample = 0;
  auto record_until = [&](double horizon) {
    while (sampling && next_sample <= horizon) {
      out.trajectory.times.push_back(next_sample);
      out.trajectory.states.push_back(s);
      next_sample += sample_dt;
    }
  };

  std::int64_t level_target = -1;
  int level_trait = 0;
  if (stop.level) {
    level_trait = stop.level->first;
    level_target =
        static_cast<std::int64_t>(std::floor(stop.level->second * K));
  }

  auto finish = [&](StopReason reason, double at) {
    record_until(at);
    out.outcome.stop = reason;
    out.outcome.t = at;
    out.outcome.state = s;
    out.outcome.events = events;
    if (sampling &&
        (out.trajectory.times.empty() || out.trajectory.times.back() != at)) {
      out.trajectory.times.push_back(at);
      out.trajectory.states.push_back(s);
    }
  };

  auto state_condition = [&]() -> std::optional<StopReason> {
    if (stop.mutant_extinction_trait) {
      const std::int64_t mutant =
          *stop.mutant_extinction_trait == 1 ? s.n1a + s.n1d : s.n2;
      if (mutant == 0) return StopReason::MutantExtinct;
    }
    if (level_target >= 0) {
      const std::int64_t tot = level_trait == 1 ? s.n1a + s.n1d : s.n2;
      if (tot == level_target) return StopReason::LevelReached;
    }
    if (stop.coex_set && stop.check_coex_before_trait2 &&
        in_box(s, inv_k, *stop.coex_set))
      return StopReason::HitCoexSet;
    if (stop.trait2_set && in_box(s, inv_k, *stop.trait2_set))
      return StopReason::HitTrait2Set;
    if (stop.coex_set && !stop.check_coex_before_trait2 &&
        in_box(s, inv_k, *stop.coex_set))
      return StopReason::HitCoexSet;
    if (stop.trait1_set && in_box(s, inv_k, *stop.trait1_set))
      return StopReason::HitTrait1Set;
    return std::nullopt;
  };

  if (auto reason = state_condition()) {
    finish(*reason, 0.0);
    return out;
  }

  for (;;) {
    const Rates8 r = compute_rates(consts, s);
    const double total =
        r[0] + r[1] + r[2] + r[3] + r[4] + r[5] + r[6] + r[7];
    if (!(total > 0)) {
      finish(StopReason::Absorbed, t);
      return out;
    }
    const double t_next = t + rng.exponential(total);
    if (t_next > stop.t_cap) {
      finish(StopReason::TimeCap, stop.t_cap);
      return out;
    }
    record_until(t_next);

    double u = rng.uniform() * total;
    int ch = 0;
    for (; ch < 7; ++ch) {
      if (u < r[ch]) break;
      u -= r[ch];
    }
    apply_channel(s, ch);
    t = t_next;
    ++events;

    if (auto reason = state_condition()) {
      finish(*reason, t);
      return out;
    }
    if (events >= stop.event_cap) {
      finish(StopReason::EventCap, t);
      return out;
    }
  }
}

}  // namespace dormhgt
