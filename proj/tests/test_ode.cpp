#include <doctest.h>

#include <cmath>

#include "dormhgt/ode.hpp"
#include "test_util.hpp"

using namespace dormhgt;
using namespace dormhgt::testing;

TEST_CASE("right-hand sides at distinguished states") {
  ModelParams q{3, 2, 1, 1.2, 0.4, 0.3, 0.9, 0.7};
  // absorbing origin
  for (double f : rhs_full(q, {0, 0, 0})) CHECK(f == 0.0);
  // pure seed-bank state
  {
    const State3 f = rhs_full(q, {0, 1, 0});
    CHECK(f[0] == doctest::Approx(q.sigma));
    CHECK(f[1] == doctest::Approx(-(q.kappa * q.mu + q.sigma)));
    CHECK(f[2] == 0.0);
  }
  // one-trait equilibria annihilate the flow
  {
    const auto t1 = trait1_equilibrium(q);
    const State3 f = rhs_full(q, {t1[0], t1[1], 0});
    for (double fi : f) CHECK(std::abs(fi) < 1e-12);
  }
}

TEST_CASE("special-case RHS agree exactly with the full system") {
  Rng rng(0xC001);
  for (int i = 0; i < 300; ++i) {
    ModelParams q = random_params(rng);
    const double n1 = uniform_in(rng, 0, 5);
    const double n1d = uniform_in(rng, 0, 5);
    const double n2 = uniform_in(rng, 0, 5);
    // p = 0, n1d = 0: planar system on shared coordinates
    {
      ModelParams qq = q;
      qq.p = 0;
      const State3 f3 = rhs_full(qq, {n1, 0, n2});
      const auto f2 = rhs_dormancy_free(qq, {n1, n2});
      CHECK(f3[0] == f2[0]);
      CHECK(f3[2] == f2[1]);
      CHECK(f3[1] == 0.0);
    }
    // tau = 0: identical fields
    {
      ModelParams qq = q;
      qq.tau = 0;
      const State3 f3 = rhs_full(qq, {n1, n1d, n2});
      const State3 g3 = rhs_hgt_free(qq, {n1, n1d, n2});
      CHECK(f3[0] == g3[0]);
      CHECK(f3[1] == g3[1]);
      CHECK(f3[2] == g3[2]);
    }
  }
}

TEST_CASE("reduced diagnostic system") {
  ModelParams q = coexist3_params();
  // origin is an equilibrium
  for (double f : rhs_reduced(q, {0, 0})) CHECK(f == 0.0);
  // the coexistence (n1a, n1d) pair is an equilibrium of the reduced flow
  const auto co = coexistence_equilibrium(q);
  REQUIRE(co.has_value());
  const auto f = rhs_reduced(q, {(*co)[0], (*co)[1]});
  CHECK(std::abs(f[0]) < 1e-10);
  CHECK(std::abs(f[1]) < 1e-10);
  // hand substitution at a generic point
  const double n1a = 0.7, n1d = 0.3;
  const auto g = rhs_reduced(q, {n1a, n1d});
  const double expected0 =
      n1a * (q.lambda1 - q.lambda2 - q.tau / q.C * (q.lambda2 - q.mu) -
             q.tau * q.tau / q.C * n1a) +
      q.sigma * n1d;
  const double expected1 =
      n1a * q.p * (q.lambda2 - q.mu + q.tau * n1a) -
      (q.kappa * q.mu + q.sigma) * n1d;
  CHECK(g[0] == doctest::Approx(expected0));
  CHECK(g[1] == doctest::Approx(expected1));
}

TEST_CASE("integrator reproduces the logistic closed form") {
  // p = 0 and no trait 2: n1' = n1 (lambda1 - mu - C n1)
  ModelParams q{2.5, 1, 1, 0.8, 0.0, 0, 1, 0.6};
  const double r = q.lambda1 - q.mu;
  const double kcap = r / q.C;
  const double n0 = 0.1;
  std::vector<double> samples;
  for (int i = 1; i <= 20; ++i) samples.push_back(i);
  const Trajectory traj = integrate(q, OdeSystem::DormancyFree, {n0, 0, 0},
                                    20.0, {}, samples);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const double expected =
        kcap * n0 * std::exp(r * t) / (kcap + n0 * (std::exp(r * t) - 1.0));
    CHECK(std::abs(traj.states[i][0] - expected) < 1e-8);
    CHECK(traj.states[i][1] == 0.0);  // axis stays invariant
  }
}

TEST_CASE("planar sink is reached from the reference initial condition") {
  ModelParams q{5, 3, 2, 1, 0.0, 0, 1, 1};
  const ConvergenceResult res =
      converge(q, OdeSystem::DormancyFree, {0.1, 2.5, 0}, 1e-6, 1e4);
  CHECK(res.converged);
  CHECK(res.matched == MatchedEquilibrium::Coexistence);
  CHECK(std::abs(res.terminal[0] - 1.0) < 1e-6);
  CHECK(std::abs(res.terminal[1] - 1.0) < 1e-6);
}

TEST_CASE("axes are invariant subspaces") {
  ModelParams q{3, 2.2, 1, 1, 0.3, 0.1, 1, 0.8};
  // no trait 2: n2 stays exactly zero
  {
    const Trajectory traj =
        integrate(q, OdeSystem::Full, {0.5, 0.2, 0}, 10.0, {}, {5.0});
    for (const auto& s : traj.states) CHECK(s[2] == 0.0);
  }
  // no trait 1: both trait-1 coordinates stay exactly zero
  {
    const Trajectory traj =
        integrate(q, OdeSystem::Full, {0, 0, 0.3}, 10.0, {}, {5.0});
    for (const auto& s : traj.states) {
      CHECK(s[0] == 0.0);
      CHECK(s[1] == 0.0);
    }
  }
}

TEST_CASE("positive orthant invariance over random runs") {
  Rng rng(0xC002);
  for (int i = 0; i < 100; ++i) {
    const ModelParams q = random_params(rng);
    const State3 init{uniform_in(rng, 0, 3), uniform_in(rng, 0, 3),
                      uniform_in(rng, 0, 3)};
    // integrate() throws if any coordinate undershoots below -atol = -1e-12
    const Trajectory traj = integrate(q, OdeSystem::Full, init, 20.0);
    for (const auto& s : traj.states)
      for (double x : s) CHECK(x >= 0.0);
  }
}

TEST_CASE("convergence to the trait-2 equilibrium in the fixation-2 regime") {
  // reversed first inequality + second inequality hold here
  ModelParams q{3, 3, 1, 1, 0.5, 0, 1, 2};
  const auto t1 = trait1_equilibrium(q);
  const double eps = 1e-2;
  const State3 init{t1[0], t1[1], std::sqrt(eps) / 2};
  const ConvergenceResult res = converge(q, OdeSystem::Full, init, 1e-6, 1e4);
  CHECK(res.converged);
  CHECK(res.matched == MatchedEquilibrium::Trait2);
}

TEST_CASE("convergence to coexistence in the stable-chain regime") {
  const ModelParams q = coexist3_params();
  const auto t1 = trait1_equilibrium(q);
  const double eps = 1e-2;
  const State3 init{t1[0], t1[1], std::sqrt(eps) / 2};
  const ConvergenceResult res = converge(q, OdeSystem::Full, init, 1e-6, 1e4);
  CHECK(res.converged);
  CHECK(res.matched == MatchedEquilibrium::Coexistence);
}

TEST_CASE("balanced mutant composition drives trait-1 fixation") {
  // regime II parameters; initial dormant/active ratio strictly between the
  // lemma's two bounds
  ModelParams q{2, 2.02, 1, 1, 0.1, 0, 0.9, 0.05};
  const double n1a0 = 0.02, n2_0 = trait2_equilibrium(q);
  const double lower = (q.mu - q.lambda1 + q.C * (n2_0 + n1a0) +
                        q.tau * n2_0) /
                       q.sigma;
  const double upper = q.p * q.C * (n1a0 + n2_0) / (q.kappa * q.mu + q.sigma);
  REQUIRE(lower < upper);
  const double ratio = 0.5 * (lower + upper);
  const State3 init{n1a0, ratio * n1a0, n2_0};
  const ConvergenceResult res = converge(q, OdeSystem::Full, init, 1e-6, 1e4);
  CHECK(res.converged);
  CHECK(res.matched == MatchedEquilibrium::Trait1);
}

TEST_CASE("n2 increases while its effective pressure is below lambda2 - mu") {
  const ModelParams q = coexist3_params();
  const auto t1 = trait1_equilibrium(q);
  const State3 init{t1[0], t1[1], 0.05};
  std::vector<double> samples;
  for (int i = 1; i <= 4000; ++i) samples.push_back(i * 0.005);
  const Trajectory traj =
      integrate(q, OdeSystem::Full, init, 20.0, {}, samples);
  auto pressure = [&](const State3& s) {
    return q.C * (s[0] + s[2]) - q.tau * s[0];
  };
  int asserted = 0;
  // margin keeps the sign claim away from the crossing within one sample step
  const double margin = 0.05;
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    const auto& s0 = traj.states[i];
    const auto& s1 = traj.states[i + 1];
    if (pressure(s0) < q.lambda2 - q.mu - margin &&
        pressure(s1) < q.lambda2 - q.mu - margin) {
      CHECK(s1[2] > s0[2]);
      ++asserted;
    }
  }
  CHECK(asserted > 50);
}

TEST_CASE("halving tolerances barely moves terminal states") {
  const ModelParams q = coexist3_params();
  const State3 init{1.0, 0.5, 0.3};
  StepControls tight;
  tight.rtol = 0.5e-9;
  tight.atol = 0.5e-12;
  const Trajectory a = integrate(q, OdeSystem::Full, init, 50.0);
  const Trajectory b = integrate(q, OdeSystem::Full, init, 50.0, tight);
  for (int d = 0; d < 3; ++d)
    CHECK(std::abs(a.states.back()[d] - b.states.back()[d]) < 1e-7);
}

TEST_CASE("input validation") {
  ModelParams q{2, 2, 1, 1, 0.3, 0, 1, 0.5};
  CHECK_THROWS_AS(integrate(q, OdeSystem::Full, {-0.1, 0, 0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate(q, OdeSystem::DormancyFree, {1, 1, 0}, 1.0),
                  std::invalid_argument);  // p != 0
  ModelParams q0 = q;
  q0.p = 0;
  CHECK_NOTHROW(integrate(q0, OdeSystem::DormancyFree, {1, 1, 0}, 1.0));
}
