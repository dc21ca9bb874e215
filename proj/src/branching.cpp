#include "dormhgt/branching.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "dormhgt/equilibria.hpp"
#include "dormhgt/rng.hpp"

namespace dormhgt {

namespace {

void require_resident1_fit(const ModelParams& q) {
  if (!(q.lambda1 > q.mu))
    throw AnalysisError("resident trait 1 unfit (lambda1 <= mu): invasion "
                        "analysis inapplicable");
}

void require_resident2_fit(const ModelParams& q) {
  if (!(q.lambda2 > q.mu))
    throw AnalysisError("resident trait 2 unfit (lambda2 <= mu): invasion "
                        "analysis inapplicable");
}

// Per-individual rates of the two-type mutant-1 process in a trait-2
// resident at equilibrium density bar_n2.
struct TwoTypeRates {
  double birth;    // active -> active+1
  double death_a;  // active death (age, competition, transfer away)
  double swtch;    // active -> dormant
  double death_d;  // dormant death
  double wake;     // dormant -> active
};

TwoTypeRates two_type_rates(const ModelParams& q) {
  const double n2 = trait2_equilibrium(q);
  return {q.lambda1, q.mu + q.C * (1.0 - q.p) * n2 + q.tau * n2,
          q.C * q.p * n2, q.kappa * q.mu, q.sigma};
}

}  // namespace

double lambda_hat(const ModelParams& q) {
  require_resident1_fit(q);
  const double n1a = trait1_equilibrium(q)[0];
  return q.lambda2 - q.mu - (q.C - q.tau) * n1a;
}

MeanMatrix mean_matrix(const ModelParams& q) {
  require_resident2_fit(q);
  const double g2 = q.lambda2 - q.mu;
  return {q.lambda1 - q.mu - g2 - q.tau / q.C * g2, q.p * g2,
          q.sigma, -q.kappa * q.mu - q.sigma};
}

double lambda_tilde_closed_form(const ModelParams& q) {
  require_resident2_fit(q);
  const double kms = q.kappa * q.mu + q.sigma;
  const double d12 = q.lambda1 - q.lambda2;
  const double g2 = q.lambda2 - q.mu;
  const double alpha = q.C * kms - q.C * d12 + g2 * q.tau;
  const double inner = -q.C * q.C * kms * d12 - q.C * q.C * q.p * q.sigma * g2 +
                       q.C * kms * q.tau * g2;
  return (-alpha + std::sqrt(alpha * alpha - 4.0 * inner)) / (2.0 * q.C);
}

double lambda_tilde(const ModelParams& q) {
  const MeanMatrix j = mean_matrix(q);
  const double tr = j.a11 + j.a22;
  const double det = j.a11 * j.a22 - j.a12 * j.a21;
  const double disc = tr * tr - 4.0 * det;
  // disc >= 0 here: the off-diagonal product a12*a21 = p sigma (lambda2-mu)
  // is nonnegative, so both eigenvalues are real
  const double lam = 0.5 * (tr + std::sqrt(std::max(disc, 0.0)));
  const double closed = lambda_tilde_closed_form(q);
  const double scale = std::max({std::abs(lam), std::abs(closed), 1e-300});
  if (std::abs(lam - closed) > 1e-10 * std::max(scale, 1.0))
    throw std::logic_error("lambda_tilde: closed form disagrees with the "
                           "quadratic eigenvalue");
  return lam;
}

double q2(const ModelParams& q) {
  const double lh = lambda_hat(q);
  if (std::abs(lh) < kCriticalTol)
    throw AnalysisError("critical case (lambda_hat ~ 0): predictions "
                        "unavailable");
  if (lh < 0) return 1.0;
  const double n1a = trait1_equilibrium(q)[0];
  const double birth = q.lambda2 + q.tau * n1a;
  const double death = q.mu + q.C * n1a;
  return std::min(1.0, death / birth);
}

std::pair<double, double> q1_pair(const ModelParams& q) {
  const double lt = lambda_tilde(q);
  if (std::abs(lt) < kCriticalTol)
    throw AnalysisError("critical case (lambda_tilde ~ 0): predictions "
                        "unavailable");
  if (lt < 0) return {1.0, 1.0};
  const TwoTypeRates r = two_type_rates(q);
  const double total_a = r.birth + r.death_a + r.swtch;
  const double total_d = r.death_d + r.wake;
  // minimal fixed point of the offspring generating system, from (0,0)
  double sa = 0, sd = 0;
  for (std::uint64_t it = 0; it < 1000000; ++it) {
    const double na = (r.birth * sa * sa + r.death_a + r.swtch * sd) / total_a;
    const double nd = (r.wake * sa + r.death_d) / total_d;
    const double inc = std::max(std::abs(na - sa), std::abs(nd - sd));
    sa = na;
    sd = nd;
    if (inc < 1e-12) return {sa, sd};
  }
  throw std::runtime_error("q1 fixed-point iteration did not converge");
}

double q1(const ModelParams& q) { return q1_pair(q).first; }

PiProportions pi_proportions(const ModelParams& q) {
  const double lt = lambda_tilde(q);
  if (!(lt > 0))
    throw AnalysisError("lambda_tilde <= 0: no Kesten-Stigum limit");
  const MeanMatrix j = mean_matrix(q);
  // left eigenvector: pi_a j11 + pi_d j21 = lt pi_a
  const double ratio = (lt - j.a11) / j.a21;  // pi_d / pi_a
  const double pi_a = 1.0 / (1.0 + ratio);
  return {pi_a, 1.0 - pi_a, q.p == 0.0};
}

FitnessReport fitness_report(const ModelParams& q) {
  FitnessReport r;
  if (q.lambda1 > q.mu) {
    r.direction_2into1_defined = true;
    r.lambda_hat = lambda_hat(q);
    r.critical_hat = std::abs(r.lambda_hat) < kCriticalTol;
    if (!r.critical_hat) {
      const double n1a = trait1_equilibrium(q)[0];
      r.q2 = r.lambda_hat < 0
                 ? 1.0
                 : std::min(1.0, (q.mu + q.C * n1a) / (q.lambda2 + q.tau * n1a));
    }
  }
  if (q.lambda2 > q.mu) {
    r.direction_1into2_defined = true;
    r.lambda_tilde = lambda_tilde(q);
    r.critical_tilde = std::abs(r.lambda_tilde) < kCriticalTol;
    if (!r.critical_tilde) {
      r.q1 = q1(q);
      if (r.lambda_tilde > 0) {
        const PiProportions pi = pi_proportions(q);
        r.pi_defined = true;
        r.pi_active = pi.pi_active;
        r.pi_dormant = pi.pi_dormant;
        r.pi_degenerate = pi.degenerate;
      }
    }
  }
  return r;
}

std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n,
                                          double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

enum class TrialResult { Extinct, Survived, Censored };

// Single-type mutant-2 walk: extinction vs reaching the threshold only
// depends on the embedded jump chain, so no waiting times are drawn.
TrialResult run_trial_trait2(double p_birth, bool supercritical,
                             std::uint64_t threshold, std::uint64_t event_cap,
                             Rng& rng) {
  std::uint64_t n = 1;
  for (std::uint64_t ev = 0; ev < event_cap; ++ev) {
    if (rng.uniform() < p_birth) {
      if (++n >= threshold) return TrialResult::Survived;
    } else {
      if (--n == 0) return TrialResult::Extinct;
    }
  }
  return supercritical ? TrialResult::Survived : TrialResult::Censored;
}

TrialResult run_trial_trait1(const TwoTypeRates& r, bool supercritical,
                             std::uint64_t threshold, std::uint64_t event_cap,
                             Rng& rng) {
  // two-level jump-chain sampling: pick the type by total weight, then the
  // event within the type from constant conditional probabilities
  const double rate_a = r.birth + r.death_a + r.swtch;
  const double rate_d = r.death_d + r.wake;
  const double pa_birth = r.birth / rate_a;
  const double pa_death = (r.birth + r.death_a) / rate_a;
  const double pd_death = r.death_d / rate_d;
  std::uint64_t na = 1, nd = 0;
  for (std::uint64_t ev = 0; ev < event_cap; ++ev) {
    const double wa = rate_a * static_cast<double>(na);
    const double wd = rate_d * static_cast<double>(nd);
    if (rng.uniform() * (wa + wd) < wa) {
      const double u = rng.uniform();
      if (u < pa_birth) {
        ++na;
      } else if (u < pa_death) {
        --na;
      } else {
        --na;
        ++nd;
      }
    } else {
      if (rng.uniform() < pd_death) {
        --nd;
      } else {
        --nd;
        ++na;
      }
    }
    if (na + nd == 0) return TrialResult::Extinct;
    if (na + nd >= threshold) return TrialResult::Survived;
  }
  return supercritical ? TrialResult::Survived : TrialResult::Censored;
}

}  // namespace

BranchingMcResult branching_mc(const ModelParams& q, int trait,
                               std::uint64_t trials, std::uint64_t event_cap,
                               std::uint64_t seed,
                               std::uint64_t survival_threshold, int threads) {
  if (trait != 1 && trait != 2)
    throw std::invalid_argument("branching_mc: trait must be 1 or 2");
  double p_birth2 = 0;
  bool supercritical;
  TwoTypeRates rates{};
  if (trait == 2) {
    require_resident1_fit(q);
    const double n1a = trait1_equilibrium(q)[0];
    const double birth = q.lambda2 + q.tau * n1a;
    const double death = q.mu + q.C * n1a;
    p_birth2 = birth / (birth + death);
    supercritical = birth > death;
  } else {
    require_resident2_fit(q);
    rates = two_type_rates(q);
    supercritical = lambda_tilde(q) > 0;
  }

  const int nthreads = std::max(1, threads);
  std::vector<std::uint64_t> extinct(nthreads, 0), survived(nthreads, 0),
      censored(nthreads, 0);
  auto worker = [&](int w) {
    for (std::uint64_t i = w; i < trials; i += nthreads) {
      Rng rng(derive_seed(seed, i));
      const TrialResult res =
          trait == 2 ? run_trial_trait2(p_birth2, supercritical,
                                        survival_threshold, event_cap, rng)
                     : run_trial_trait1(rates, supercritical,
                                        survival_threshold, event_cap, rng);
      if (res == TrialResult::Extinct)
        ++extinct[w];
      else if (res == TrialResult::Survived)
        ++survived[w];
      else
        ++censored[w];
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }

  BranchingMcResult out;
  out.trials = trials;
  for (int w = 0; w < nthreads; ++w) {
    out.extinct += extinct[w];
    out.survived += survived[w];
    out.censored += censored[w];
  }
  const std::uint64_t counted = out.extinct + out.survived;
  out.fraction_extinct =
      counted ? static_cast<double>(out.extinct) / counted : 0.0;
  std::tie(out.wilson_low, out.wilson_high) =
      wilson_interval(out.extinct, counted, 1.96);
  out.std_error =
      counted ? std::sqrt(out.fraction_extinct * (1.0 - out.fraction_extinct) /
                          counted)
              : 0.0;
  return out;
}

}  // namespace dormhgt
