#ifndef DORMHGT_TEST_UTIL_HPP
#define DORMHGT_TEST_UTIL_HPP

#include <stdexcept>

#include "dormhgt/equilibria.hpp"
#include "dormhgt/rng.hpp"

namespace dormhgt::testing {

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

inline ModelParams random_params(Rng& rng) {
  ModelParams q;
  q.lambda1 = uniform_in(rng, 0.2, 6.0);
  q.lambda2 = uniform_in(rng, 0.2, 6.0);
  q.mu = uniform_in(rng, 0.3, 3.0);
  q.C = uniform_in(rng, 0.3, 3.0);
  q.p = uniform_in(rng, 0.02, 0.95);
  q.kappa = uniform_in(rng, 0.0, 1.5);
  q.sigma = uniform_in(rng, 0.2, 3.0);
  q.tau = uniform_in(rng, 0.02, 3.0);
  return q;
}

// Rejection-samples until one of the two coexistence chains holds. Draws
// alternate between a small-tau bias (founder chain lives at
// tau < C p sigma/(kappa mu + sigma)) and the plain ranges.
inline ModelParams random_params_with_coexistence(Rng& rng) {
  for (int attempt = 0; attempt < 2000000; ++attempt) {
    ModelParams q = random_params(rng);
    if (attempt % 2 == 0) {
      const double bound = q.C * q.p * q.sigma / (q.kappa * q.mu + q.sigma);
      q.tau = uniform_in(rng, 0.2, 0.999) * bound;
      if (q.tau <= 0) continue;
      q.lambda2 = q.lambda1 + uniform_in(rng, 0.01, 2.0);
    }
    const CoexistenceKind kind = coexistence_kind(q);
    if (kind == CoexistenceKind::Unstable || kind == CoexistenceKind::Stable)
      return q;
  }
  throw std::runtime_error("failed to sample a coexistence parameter set");
}

// Reference parameter sets used across the suites.
inline ModelParams founder_params() {  // regime I
  return {2.0, 2.054, 1.0, 1.0, 0.1, 0.0, 0.9, 0.05};
}

inline ModelParams coexist3_params() {  // regime III' (lambda2 < mu)
  return {5.0, 0.5, 1.0, 1.0, 0.05, 0.0, 1.0, 1.2};
}

inline ModelParams fixation2_params() {  // regime IV'
  return {3.0, 2.8, 1.0, 1.0, 0.3, 0.0, 1.0, 1.0};
}

// Also regime IV', with a small resident equilibrium so stochastic trials
// are cheap; used for the hitting-time scaling study.
inline ModelParams fixation2_light_params() {
  return {1.6, 1.5, 1.0, 1.0, 0.3, 0.0, 1.0, 1.5};
}

inline ModelParams q1_reference_params() {  // q1 = 2/3
  return {3.0, 2.0, 1.0, 1.0, 0.5, 0.0, 1.0, 0.5};
}

inline ModelParams q2_reference_params() {  // q2 = 5/6, p = 0
  return {5.0, 3.0, 2.0, 1.0, 0.0, 0.0, 1.0, 1.0};
}

}  // namespace dormhgt::testing

#endif
