#include "dormhgt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dormhgt/stability.hpp"

namespace dormhgt {

Direction direction_from_string(const std::string& name) {
  if (name == "2into1") return Direction::TwoIntoOne;
  if (name == "1into2") return Direction::OneIntoTwo;
  throw std::invalid_argument("unknown direction: " + name);
}

const char* to_string(Direction d) {
  return d == Direction::TwoIntoOne ? "2into1" : "1into2";
}

const char* to_string(TrialKind kind) {
  switch (kind) {
    case TrialKind::Extinction: return "extinction";
    case TrialKind::FixationMutant: return "fixation";
    case TrialKind::Coexistence: return "coexistence";
    case TrialKind::Censored: return "censored";
  }
  return "?";
}

void parallel_for(std::uint64_t n, int threads,
                  const std::function<void(std::uint64_t)>& fn) {
  const int nthreads =
      std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nthreads == 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int w = 0; w < nthreads; ++w)
    pool.emplace_back([&, w]() {
      for (std::uint64_t i = w; i < n; i += nthreads) fn(i);
    });
  for (auto& th : pool) th.join();
}

namespace {

std::int64_t round_count(double x) {
  return static_cast<std::int64_t>(std::llround(x));
}

struct TrialPlan {
  CountState init;
  StopSpec stop;
};

// Boundary and critical parameters are rejected before any simulation.
void reject_degenerate(const ModelParams& q, Direction direction) {
  if (q.tau > 0 && coexistence_kind(q) == CoexistenceKind::Boundary)
    throw AnalysisError("boundary parameters: no invasion prediction");
  if (direction == Direction::TwoIntoOne) {
    if (!(q.lambda1 > q.mu))
      throw AnalysisError("resident trait 1 unfit: 2into1 trial inapplicable");
    if (std::abs(lambda_hat(q)) < kCriticalTol)
      throw AnalysisError("critical lambda_hat: no invasion prediction");
  } else {
    if (!(q.lambda2 > q.mu))
      throw AnalysisError("resident trait 2 unfit: 1into2 trial inapplicable");
    if (std::abs(lambda_tilde(q)) < kCriticalTol)
      throw AnalysisError("critical lambda_tilde: no invasion prediction");
  }
}

TrialPlan make_plan(const ModelParams& q, double K, Direction direction,
                    const TrialSettings& settings) {
  TrialPlan plan;
  plan.stop.t_cap = settings.t_cap;
  plan.stop.event_cap = settings.event_cap;
  const auto t1 = trait1_equilibrium(q);
  const double n2bar = trait2_equilibrium(q);

  std::optional<State3> coex;
  if (q.tau > 0) coex = coexistence_equilibrium(q);
  if (coex) {
    SetTarget box;
    box.center = *coex;
    box.beta = settings.beta;
    plan.stop.coex_set = box;
  }

  if (direction == Direction::TwoIntoOne) {
    plan.init = {round_count(K * t1[0]), round_count(K * t1[1]), 1};
    plan.stop.mutant_extinction_trait = 2;
    if (q.lambda2 > q.mu) {
      SetTarget box;
      box.center = {0, 0, n2bar};
      box.must_be_zero = {true, true, false};
      box.beta = settings.beta;
      plan.stop.trait2_set = box;
    }
  } else {
    plan.init = {1, 0, round_count(K * n2bar)};
    plan.stop.mutant_extinction_trait = 1;
    SetTarget box;
    box.center = {t1[0], t1[1], 0};
    box.must_be_zero = {false, false, true};
    box.beta = settings.beta;
    plan.stop.trait1_set = box;
  }
  return plan;
}

TrialKind classify_stop(StopReason reason, Direction direction) {
  switch (reason) {
    case StopReason::MutantExtinct:
      return TrialKind::Extinction;
    case StopReason::HitCoexSet:
      return TrialKind::Coexistence;
    case StopReason::HitTrait2Set:
      return direction == Direction::TwoIntoOne ? TrialKind::FixationMutant
                                                : TrialKind::Censored;
    case StopReason::HitTrait1Set:
      return direction == Direction::OneIntoTwo ? TrialKind::FixationMutant
                                                : TrialKind::Censored;
    case StopReason::Absorbed:
      return TrialKind::Extinction;  // everyone died, mutant included
    default:
      return TrialKind::Censored;
  }
}

TrialOutcome run_plan(const ModelParams& q, double K, Direction direction,
                      const TrialPlan& plan, std::uint64_t seed) {
  const SsaRun res = run(seed, q, K, plan.init, plan.stop);
  TrialOutcome out;
  out.kind = classify_stop(res.outcome.stop, direction);
  out.t = res.outcome.t;
  out.state = res.outcome.state;
  out.events = res.outcome.events;
  return out;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double se_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0;
  const double m = mean_of(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / ((xs.size() - 1.0) * xs.size()));
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

TrialOutcome invasion_trial(const ModelParams& q, double K,
                            Direction direction, std::uint64_t seed,
                            const TrialSettings& settings) {
  validate(q);
  reject_degenerate(q, direction);
  const TrialPlan plan = make_plan(q, K, direction, settings);
  return run_plan(q, K, direction, plan, seed);
}

StudySummary invasion_study(const ModelParams& q,
                            const std::vector<double>& k_list,
                            std::uint64_t trials, Direction direction,
                            double beta, std::uint64_t base_seed, int threads,
                            const TrialSettings& settings_in, bool keep_raw) {
  validate(q);
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  reject_degenerate(q, direction);

  TrialSettings settings = settings_in;
  settings.beta = beta;

  const FitnessReport fit = fitness_report(q);
  StudySummary summary;
  summary.direction = direction;
  summary.beta = beta;
  summary.base_seed = base_seed;

  for (std::size_t ik = 0; ik < k_list.size(); ++ik) {
    const double K = k_list[ik];
    const TrialPlan plan = make_plan(q, K, direction, settings);
    std::vector<TrialOutcome> outcomes(trials);
    parallel_for(trials, threads, [&](std::uint64_t i) {
      const std::uint64_t seed =
          derive_seed(base_seed, (static_cast<std::uint64_t>(ik) << 32) + i);
      outcomes[i] = run_plan(q, K, direction, plan, seed);
    });

    StudyRow row;
    row.K = K;
    row.trials = trials;
    const double logk = std::log(K);
    std::vector<double> hit_times, ext_times;
    for (const auto& o : outcomes) {
      switch (o.kind) {
        case TrialKind::Extinction:
          ++row.extinct;
          ext_times.push_back(o.t / logk);
          break;
        case TrialKind::FixationMutant:
          ++row.fixation;
          hit_times.push_back(o.t / logk);
          break;
        case TrialKind::Coexistence:
          ++row.coexistence;
          hit_times.push_back(o.t / logk);
          break;
        case TrialKind::Censored:
          ++row.censored;
          break;
      }
    }
    const std::uint64_t counted = trials - row.censored;
    const std::uint64_t success = row.fixation + row.coexistence;
    row.p_success =
        counted ? static_cast<double>(success) / counted : 0.0;
    std::tie(row.wilson_low, row.wilson_high) =
        wilson_interval(success, counted, 1.96);
    if (direction == Direction::TwoIntoOne) {
      row.theory_success = fit.critical_hat ? 0 : 1.0 - fit.q2;
      row.theory_coex_const =
          fit.lambda_hat != 0 ? 1.0 / fit.lambda_hat : 0;
      row.theory_fix_const =
          (fit.lambda_hat != 0 && fit.direction_1into2_defined &&
           fit.lambda_tilde != 0)
              ? 1.0 / fit.lambda_hat - 1.0 / fit.lambda_tilde
              : 0;
    } else {
      row.theory_success = fit.critical_tilde ? 0 : 1.0 - fit.q1;
      row.theory_coex_const =
          fit.lambda_tilde != 0 ? 1.0 / fit.lambda_tilde : 0;
      row.theory_fix_const =
          (fit.lambda_tilde != 0 && fit.direction_2into1_defined &&
           fit.lambda_hat != 0)
              ? 1.0 / fit.lambda_tilde - 1.0 / fit.lambda_hat
              : 0;
    }
    row.mean_t_over_logk = mean_of(hit_times);
    row.se_t_over_logk = se_of(hit_times);
    row.median_t_over_logk = median_of(hit_times);
    row.mean_t0_over_logk = mean_of(ext_times);
    row.se_t0_over_logk = se_of(ext_times);
    summary.rows.push_back(row);
    if (keep_raw) summary.raw.push_back(std::move(outcomes));
  }
  return summary;
}

ProportionCheck proportion_check(const ModelParams& q, double K,
                                 std::uint64_t trials, double eps, double delta,
                                 std::uint64_t base_seed, int threads,
                                 const TrialSettings& settings) {
  validate(q);
  if (!(q.lambda2 > q.mu))
    throw AnalysisError("proportion check needs a fit trait-2 resident");
  const double lt = lambda_tilde(q);
  if (!(lt > 0))
    throw AnalysisError("proportion check needs lambda_tilde > 0");

  ProportionCheck out;
  out.trials = trials;
  out.pi_active = pi_proportions(q).pi_active;

  StopSpec stop;
  stop.mutant_extinction_trait = 1;
  stop.level = {1, eps};
  stop.t_cap = settings.t_cap;
  stop.event_cap = settings.event_cap;
  const CountState init{1, 0, round_count(K * trait2_equilibrium(q))};

  std::vector<double> fractions(trials,
                                std::numeric_limits<double>::quiet_NaN());
  parallel_for(trials, threads, [&](std::uint64_t i) {
    const SsaRun res = run(derive_seed(base_seed, i), q, K, init, stop);
    if (res.outcome.stop == StopReason::LevelReached) {
      const double tot =
          static_cast<double>(res.outcome.state.n1a + res.outcome.state.n1d);
      fractions[i] = static_cast<double>(res.outcome.state.n1a) / tot;
    }
  });
  for (double f : fractions) {
    if (std::isnan(f)) continue;
    ++out.reached;
    out.active_fractions.push_back(f);
    if (std::abs(f - out.pi_active) < delta) ++out.within;
  }
  out.fraction_within =
      out.reached ? static_cast<double>(out.within) / out.reached : 0.0;
  return out;
}

MeanFieldCheck meanfield_check(const ModelParams& q, double K, double horizon,
                               std::uint64_t reps, std::uint64_t base_seed,
                               const State3* init_opt, int threads,
                               double sample_dt) {
  validate(q);
  State3 init;
  if (init_opt) {
    init = *init_opt;
  } else {
    const auto t1 = trait1_equilibrium(q);
    init = {t1[0], t1[1], 0};
  }
  const CountState init_counts{round_count(K * init[0]),
                               round_count(K * init[1]),
                               round_count(K * init[2])};
  const State3 scaled_init{init_counts.n1a / K, init_counts.n1d / K,
                           init_counts.n2 / K};
  std::vector<double> sample_times;
  for (double t = sample_dt; t < horizon; t += sample_dt)
    sample_times.push_back(t);
  const Trajectory ode =
      integrate(q, OdeSystem::Full, scaled_init, horizon, {}, sample_times);

  StopSpec stop;
  stop.t_cap = horizon;

  MeanFieldCheck out;
  out.K = K;
  out.horizon = horizon;
  out.sup_deviation.resize(reps);
  parallel_for(reps, threads, [&](std::uint64_t i) {
    const SsaRun res =
        run(derive_seed(base_seed, i), q, K, init_counts, stop, sample_dt);
    double sup = 0;
    // both paths are sampled on the same grid {0, dt, 2dt, ...}
    const std::size_t n =
        std::min(res.trajectory.times.size(), ode.times.size());
    for (std::size_t j = 0; j < n; ++j) {
      const auto& cs = res.trajectory.states[j];
      const auto& os = ode.states[j];
      sup = std::max({sup, std::abs(cs.n1a / K - os[0]),
                      std::abs(cs.n1d / K - os[1]),
                      std::abs(cs.n2 / K - os[2])});
    }
    out.sup_deviation[i] = sup;
  });
  out.median_deviation = median_of(out.sup_deviation);
  return out;
}

}  // namespace dormhgt
