#include <doctest.h>

#include <cmath>

#include "dormhgt/branching.hpp"
#include "dormhgt/equilibria.hpp"
#include "test_util.hpp"

using namespace dormhgt;
using namespace dormhgt::testing;

TEST_CASE("lambda_hat") {
  // tau = C kills the competition term
  {
    ModelParams q{4, 2.7, 1.5, 1.3, 0.4, 0.2, 0.8, 1.3};
    CHECK(lambda_hat(q) == doctest::Approx(q.lambda2 - q.mu).epsilon(1e-14));
  }
  CHECK(lambda_hat(q2_reference_params()) == doctest::Approx(1.0).epsilon(1e-14));
  {
    ModelParams q{3, 2, 1, 1, 0.1, 0, 0.9, 0.1};
    CHECK(lambda_hat(q) == doctest::Approx(-1.0).epsilon(1e-12));
  }
  ModelParams unfit{1, 2, 2, 1, 0.1, 0, 1, 1};
  CHECK_THROWS_AS(lambda_hat(unfit), AnalysisError);
}

TEST_CASE("mean matrix entries") {
  {
    const MeanMatrix j = mean_matrix(q1_reference_params());
    CHECK(j.a11 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(j.a12 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(j.a21 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j.a22 == doctest::Approx(-1.0).epsilon(1e-14));
  }
  {
    ModelParams q{3, 2, 1, 1, 0.0, 0.3, 1, 0.5};
    CHECK(mean_matrix(q).a12 == 0.0);
  }
  {
    ModelParams q{2, 2, 1, 1, 0.4, 0.3, 1, 0.0};
    CHECK(mean_matrix(q).a11 == 0.0);
  }
  ModelParams unfit{3, 1, 2, 1, 0.1, 0, 1, 1};
  CHECK_THROWS_AS(mean_matrix(unfit), AnalysisError);
}

TEST_CASE("lambda_tilde") {
  CHECK(lambda_tilde(q1_reference_params()) ==
        doctest::Approx(0.7807764064044151).epsilon(1e-13));
  {
    ModelParams q = q2_reference_params();  // p = 0: triangular mean matrix
    CHECK(lambda_tilde(q) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("lambda_tilde closed form agrees with the quadratic eigenvalue") {
  Rng rng(0xA001);
  int checked = 0;
  while (checked < 1000) {
    const ModelParams q = random_params(rng);
    if (!(q.lambda2 > q.mu)) continue;
    const double numeric = lambda_tilde(q);  // internally cross-checked
    const double closed = lambda_tilde_closed_form(q);
    const double scale = std::max({std::abs(numeric), std::abs(closed), 1.0});
    CHECK(std::abs(numeric - closed) / scale < 1e-10);
    ++checked;
  }
}

TEST_CASE("sign equivalences with the chain inequalities") {
  Rng rng(0xA002);
  int hat_checked = 0, tilde_checked = 0;
  for (int i = 0; i < 20000; ++i) {
    const ModelParams q = random_params(rng);
    const double m = middle_expression(q);
    if (q.lambda1 > q.mu && std::abs(m - (q.lambda1 - q.mu)) > 1e-9) {
      // lambda_hat > 0 iff M < lambda1 - mu (second coexistence inequality)
      CHECK((lambda_hat(q) > 0) == (m < q.lambda1 - q.mu));
      ++hat_checked;
    }
    if (q.lambda2 > q.mu && std::abs(m - (q.lambda2 - q.mu)) > 1e-9) {
      // lambda_tilde > 0 iff det J < 0 iff M > lambda2 - mu
      const MeanMatrix j = mean_matrix(q);
      const double det = j.a11 * j.a22 - j.a12 * j.a21;
      const double lt = lambda_tilde(q);
      if (std::abs(lt) > 1e-9) {
        CHECK((lt > 0) == (det < 0));
        CHECK((lt > 0) == (m > q.lambda2 - q.mu));
        ++tilde_checked;
      }
    }
  }
  CHECK(hat_checked > 1000);
  CHECK(tilde_checked > 1000);
}

TEST_CASE("q2 values") {
  // subcritical: certain extinction
  {
    ModelParams q{3, 2, 1, 1, 0.1, 0, 0.9, 0.1};  // lambda_hat = -1
    CHECK(q2(q) == 1.0);
  }
  CHECK(q2(q2_reference_params()) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
  // tau = 0 with lambda2 = mu + C bar_n1a + 1
  {
    ModelParams q{2, 0, 1, 1, 0.3, 0, 1, 0};
    const double n1a = trait1_equilibrium(q)[0];
    q.lambda2 = q.mu + q.C * n1a + 1.0;
    const double expected = (q.mu + q.C * n1a) / (q.mu + q.C * n1a + 1.0);
    CHECK(q2(q) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("q2 monotone in lambda2 and tau; in mu for p = 0") {
  ModelParams base{4, 2.5, 1, 1, 0.3, 0.2, 1, 0.62};
  double prev = 2;
  for (double l2 = 1.2; l2 <= 4.0; l2 += 0.2) {
    ModelParams q = base;
    q.lambda2 = l2;
    const double v = q2(q);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  prev = 2;
  for (double tau = 0.05; tau <= 3.0; tau += 0.15) {
    ModelParams q = base;
    q.tau = tau;
    const double v = q2(q);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  // holding bar_n1a's other ingredients fixed, mu-monotonicity needs p = 0
  prev = -1;
  for (double mu = 0.5; mu <= 2.5; mu += 0.1) {
    ModelParams q{4, 2.4, mu, 1, 0.0, 0.2, 1, 0.62};
    const double v = q2(q);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("q1 values") {
  // not supercritical: q1 = 1
  {
    ModelParams q{2, 3, 1, 1, 0.3, 0, 1, 0.5};  // lambda1 far below lambda2
    if (lambda_tilde(q) <= 0) CHECK(q1(q) == 1.0);
  }
  // kappa = 0 forces s_d = s_a: q1 solves 3s^2 - 5s + 2 = 0, minimal root 2/3
  {
    const auto [sa, sd] = q1_pair(q1_reference_params());
    CHECK(sa == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(sd == doctest::Approx(sa).epsilon(1e-10));
  }
  // p -> 0 reduces to the single-type active walk
  {
    ModelParams q{3, 2, 1, 1, 1e-8, 0, 1, 0.5};
    const double n2 = trait2_equilibrium(q);
    const double death = q.mu + q.C * (1 - q.p) * n2 + q.tau * n2;
    CHECK(q1(q) ==
          doctest::Approx(std::min(1.0, death / q.lambda1)).epsilon(1e-6));
  }
}

TEST_CASE("q1 fixed point solves the offspring system") {
  Rng rng(0xA003);
  int checked = 0;
  while (checked < 300) {
    const ModelParams q = random_params(rng);
    if (!(q.lambda2 > q.mu)) continue;
    const double lt = lambda_tilde(q);
    if (std::abs(lt) < 1e-6) continue;
    const auto [sa, sd] = q1_pair(q);
    const double n2 = trait2_equilibrium(q);
    const double death_a = q.mu + q.C * (1 - q.p) * n2 + q.tau * n2;
    const double swtch = q.C * q.p * n2;
    const double r1 = q.lambda1 * (sa * sa - sa) + swtch * (sd - sa) +
                      death_a * (1 - sa);
    const double r2 = q.sigma * (sa - sd) + q.kappa * q.mu * (1 - sd);
    CHECK(std::abs(r1) < 1e-9);
    CHECK(std::abs(r2) < 1e-9);
    CHECK(sa >= 0);
    CHECK(sa <= 1);
    if (lt > 0) CHECK(sa < 1);
    ++checked;
  }
}

TEST_CASE("pi proportions") {
  {
    const PiProportions pi = pi_proportions(q1_reference_params());
    CHECK(pi.pi_active == doctest::Approx(0.7807764064044151).epsilon(1e-12));
    CHECK(pi.pi_dormant == doctest::Approx(0.2192235935955849).epsilon(1e-12));
    CHECK_FALSE(pi.degenerate);
  }
  // p = 0: boundary (1, 0) with the degeneracy flag
  {
    ModelParams q = q2_reference_params();
    const PiProportions pi = pi_proportions(q);
    CHECK(pi.pi_active == doctest::Approx(1.0));
    CHECK(pi.degenerate);
  }
  // eigenvector identity pi J = lambda_tilde pi over random draws
  Rng rng(0xA004);
  int checked = 0;
  while (checked < 500) {
    const ModelParams q = random_params(rng);
    if (!(q.lambda2 > q.mu)) continue;
    const double lt = lambda_tilde(q);
    if (!(lt > 1e-8)) continue;
    const MeanMatrix j = mean_matrix(q);
    const PiProportions pi = pi_proportions(q);
    CHECK(pi.pi_active > 0);
    CHECK(pi.pi_active + pi.pi_dormant == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pi.pi_active * j.a11 + pi.pi_dormant * j.a21 -
                   lt * pi.pi_active) < 1e-10);
    CHECK(std::abs(pi.pi_active * j.a12 + pi.pi_dormant * j.a22 -
                   lt * pi.pi_dormant) < 1e-10);
    ++checked;
  }
  ModelParams sub{2, 3, 1, 1, 0.3, 0, 1, 0.5};
  if (lambda_tilde(sub) <= 0) CHECK_THROWS_AS(pi_proportions(sub), AnalysisError);
}

TEST_CASE("branching MC smoke agreement at reduced size") {
  // full 1e5-trial runs live in the acceptance suite
  {
    const BranchingMcResult r =
        branching_mc(q2_reference_params(), 2, 20000, 10000000, 42, 2000, 2);
    CHECK(r.censored == 0);
    CHECK(std::abs(r.fraction_extinct - 5.0 / 6.0) < 3.5 * r.std_error);
  }
  {
    const BranchingMcResult r =
        branching_mc(q1_reference_params(), 1, 20000, 10000000, 43, 2000, 2);
    CHECK(std::abs(r.fraction_extinct - 2.0 / 3.0) < 3.5 * r.std_error);
  }
  // subcritical process dies in every trial
  {
    ModelParams q{3, 2, 1, 1, 0.1, 0, 0.9, 0.1};  // lambda_hat < 0
    const BranchingMcResult r = branching_mc(q, 2, 2000, 10000000, 7, 2000, 2);
    CHECK(r.fraction_extinct == 1.0);
  }
}

TEST_CASE("closed forms match branching MC on five reference sets") {
  // spans sub- and supercritical regimes in both directions, 1e5 trials each
  struct Case {
    ModelParams params;
    int trait;
  };
  const Case cases[] = {
      {q2_reference_params(), 2},                   // q2 = 5/6
      {q1_reference_params(), 1},                   // q1 = 2/3
      {fixation2_params(), 2},                      // q2 = 15/22
      {{3, 2, 1, 1, 0.1, 0, 0.9, 0.1}, 2},          // lambda_hat < 0: q2 = 1
      {{2, 3, 1, 1, 0.3, 0, 1, 0.5}, 1},            // lambda_tilde < 0: q1 = 1
  };
  for (const Case& c : cases) {
    const double target = c.trait == 2 ? q2(c.params) : q1(c.params);
    const BranchingMcResult r =
        branching_mc(c.params, c.trait, 100000, 10000000, 0xBEE5 + c.trait,
                     5000, 2);
    if (target == 1.0) {
      CHECK(r.fraction_extinct == 1.0);
    } else {
      const double se = std::sqrt(target * (1 - target) / 100000.0);
      CHECK(std::abs(r.fraction_extinct - target) < 3 * se);
    }
  }
}

TEST_CASE("branching MC is reproducible") {
  const BranchingMcResult a =
      branching_mc(q1_reference_params(), 1, 5000, 1000000, 99, 2000, 2);
  const BranchingMcResult b =
      branching_mc(q1_reference_params(), 1, 5000, 1000000, 99, 2000, 1);
  CHECK(a.extinct == b.extinct);
  CHECK(a.survived == b.survived);
}

TEST_CASE("wilson interval sanity") {
  const auto [lo, hi] = wilson_interval(50, 100, 1.96);
  CHECK(lo > 0.40);
  CHECK(hi < 0.60);
  CHECK(lo < 0.5);
  CHECK(hi > 0.5);
  const auto [lo0, hi0] = wilson_interval(0, 100, 1.96);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
}
