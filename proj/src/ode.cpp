#include "dormhgt/ode.hpp"

#include <cmath>
#include <stdexcept>

namespace dormhgt {

OdeSystem ode_system_from_string(const std::string& name) {
  if (name == "full") return OdeSystem::Full;
  if (name == "p0") return OdeSystem::DormancyFree;
  if (name == "tau0") return OdeSystem::HgtFree;
  if (name == "reduced") return OdeSystem::Reduced;
  throw std::invalid_argument("unknown ODE system: " + name);
}

const char* to_string(OdeSystem system) {
  switch (system) {
    case OdeSystem::Full: return "full";
    case OdeSystem::DormancyFree: return "p0";
    case OdeSystem::HgtFree: return "tau0";
    case OdeSystem::Reduced: return "reduced";
  }
  return "?";
}

int ode_dimension(OdeSystem system) {
  return (system == OdeSystem::Full || system == OdeSystem::HgtFree) ? 3 : 2;
}

State3 rhs_full(const ModelParams& q, const State3& s) {
  const double n1a = s[0], n1d = s[1], n2 = s[2];
  const double crowd = n1a + n2;
  return {n1a * (q.lambda1 - q.mu - q.C * crowd - q.tau * n2) + q.sigma * n1d,
          q.p * q.C * n1a * crowd - (q.kappa * q.mu + q.sigma) * n1d,
          n2 * (q.lambda2 - q.mu - q.C * crowd + q.tau * n1a)};
}

std::array<double, 2> rhs_dormancy_free(const ModelParams& q,
                                        const std::array<double, 2>& s) {
  const double n1 = s[0], n2 = s[1];
  const double crowd = n1 + n2;
  return {n1 * (q.lambda1 - q.mu - q.C * crowd - q.tau * n2),
          n2 * (q.lambda2 - q.mu - q.C * crowd + q.tau * n1)};
}

State3 rhs_hgt_free(const ModelParams& q, const State3& s) {
  const double n1a = s[0], n1d = s[1], n2 = s[2];
  const double crowd = n1a + n2;
  return {n1a * (q.lambda1 - q.mu - q.C * crowd) + q.sigma * n1d,
          q.p * q.C * n1a * crowd - (q.kappa * q.mu + q.sigma) * n1d,
          n2 * (q.lambda2 - q.mu - q.C * crowd)};
}

std::array<double, 2> rhs_reduced(const ModelParams& q,
                                  const std::array<double, 2>& s) {
  const double n1a = s[0], n1d = s[1];
  const double g2 = q.lambda2 - q.mu;
  return {n1a * (q.lambda1 - q.lambda2 - q.tau / q.C * g2 -
                 q.tau * q.tau / q.C * n1a) +
              q.sigma * n1d,
          n1a * q.p * (g2 + q.tau * n1a) - (q.kappa * q.mu + q.sigma) * n1d};
}

State3 rhs(const ModelParams& q, OdeSystem system, const State3& s) {
  switch (system) {
    case OdeSystem::Full:
      return rhs_full(q, s);
    case OdeSystem::HgtFree:
      return rhs_hgt_free(q, s);
    case OdeSystem::DormancyFree: {
      const auto f = rhs_dormancy_free(q, {s[0], s[1]});
      return {f[0], f[1], 0.0};
    }
    case OdeSystem::Reduced: {
      const auto f = rhs_reduced(q, {s[0], s[1]});
      return {f[0], f[1], 0.0};
    }
  }
  return {0, 0, 0};
}

namespace {

double inf_norm(const State3& v, int dim) {
  double m = 0;
  for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

// Dormand-Prince 5(4) tableau
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600,
                 E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640,
                 E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

// Advances y from t to t_end; observer(t, y, f) is called after every
// accepted step (and once at t0) and may stop the run by returning false.
template <typename Observer>
void integrate_core(const ModelParams& q, OdeSystem system, State3& y,
                    double t0, double t_end, const StepControls& ctl,
                    Trajectory* meta, Observer&& observer) {
  const int dim = ode_dimension(system);
  double t = t0;
  double h = std::min(ctl.h_init, std::max(t_end - t0, ctl.h_min));
  State3 k1 = rhs(q, system, y);
  if (!observer(t, y, k1)) return;

  State3 k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ytmp{}, ynew{};
  std::uint64_t steps = 0, rejected = 0;
  while (t < t_end) {
    if (++steps > ctl.max_steps)
      throw std::runtime_error("ODE integration exceeded max step count");
    bool clipped = false;
    if (t + h >= t_end) {
      h = t_end - t;
      clipped = true;
    }

    for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h * A21 * k1[i];
    k2 = rhs(q, system, ytmp);
    for (int i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    k3 = rhs(q, system, ytmp);
    for (int i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    k4 = rhs(q, system, ytmp);
    for (int i = 0; i < dim; ++i)
      ytmp[i] =
          y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    k5 = rhs(q, system, ytmp);
    for (int i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] +
                            A64 * k4[i] + A65 * k5[i]);
    k6 = rhs(q, system, ytmp);
    for (int i = 0; i < dim; ++i)
      ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] +
                            B6 * k6[i]);
    k7 = rhs(q, system, ynew);

    double err = 0;
    for (int i = 0; i < dim; ++i) {
      const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                            E6 * k6[i] + E7 * k7[i]);
      const double scale =
          ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    // the orthant is invariant for the exact flow; retry with a smaller step
    // instead of accepting an undershoot beyond the clamp window
    bool undershoot = false;
    if (err <= 1.0)
      for (int i = 0; i < dim; ++i)
        if (ynew[i] < -ctl.atol) undershoot = true;

    if (err <= 1.0 && !undershoot) {
      t = clipped ? t_end : t + h;
      for (int i = 0; i < dim; ++i)
        if (ynew[i] < 0) ynew[i] = 0.0;
      y = ynew;
      k1 = k7;  // FSAL
      if (meta) ++meta->steps;
      if (!observer(t, y, k1)) return;
      const double factor = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::clamp(factor, 0.2, 5.0);
    } else {
      ++rejected;
      if (meta) ++meta->rejected;
      h *= undershoot
               ? 0.5
               : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
    }
    if (h < ctl.h_min)
      throw std::runtime_error("ODE step size underflow (stiffness failure)");
  }
}

}  // namespace

Trajectory integrate(const ModelParams& q, OdeSystem system,
                     const State3& init, double t_max,
                     const StepControls& controls,
                     const std::vector<double>& sample_times) {
  validate(q);
  const int dim = ode_dimension(system);
  for (int i = 0; i < dim; ++i)
    if (init[i] < 0)
      throw std::invalid_argument("initial state outside the positive orthant");
  if (system == OdeSystem::DormancyFree && q.p != 0)
    throw std::invalid_argument("dormancy-free system requires p = 0");
  if (system == OdeSystem::HgtFree && q.tau != 0)
    throw std::invalid_argument("HGT-free system requires tau = 0");
  for (std::size_t i = 0; i + 1 < sample_times.size(); ++i)
    if (!(sample_times[i] < sample_times[i + 1]))
      throw std::invalid_argument("sample times must be strictly increasing");

  Trajectory traj;
  traj.system = system;
  State3 y = init;
  auto record = [&](double t, const State3& s) {
    if (!traj.times.empty() && traj.times.back() == t) return;
    traj.times.push_back(t);
    traj.states.push_back(s);
  };

  // split the run at each sample time so states there are exact
  double t = 0;
  record(0.0, y);
  std::vector<double> cuts;
  for (double ts : sample_times)
    if (ts > 0 && ts < t_max) cuts.push_back(ts);
  cuts.push_back(t_max);
  State3 last_f = rhs(q, system, y);
  for (double target : cuts) {
    if (target <= t) continue;
    integrate_core(q, system, y, t, target, controls, &traj,
                   [&](double, const State3&, const State3& f) {
                     last_f = f;
                     return true;
                   });
    t = target;
    record(t, y);
  }
  traj.terminal_rhs_norm = inf_norm(last_f, dim);
  return traj;
}

const char* to_string(MatchedEquilibrium m) {
  switch (m) {
    case MatchedEquilibrium::Origin: return "origin";
    case MatchedEquilibrium::Trait1: return "trait1";
    case MatchedEquilibrium::Trait2: return "trait2";
    case MatchedEquilibrium::Coexistence: return "coexistence";
    case MatchedEquilibrium::None: return "none";
  }
  return "?";
}

namespace {

double dist3(const State3& a, const State3& b, int dim) {
  double s = 0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

ConvergenceResult converge(const ModelParams& q, OdeSystem system,
                           const State3& init, double match_tol, double t_cap,
                           double rhs_tol, const StepControls& controls) {
  validate(q);
  const int dim = ode_dimension(system);
  State3 y = init;
  ConvergenceResult res;
  double t_last = 0;
  integrate_core(q, system, y, 0.0, t_cap, controls, nullptr,
                 [&](double t, const State3&, const State3& f) {
                   t_last = t;
                   res.terminal_rhs_norm = inf_norm(f, dim);
                   return res.terminal_rhs_norm >= rhs_tol;
                 });
  res.terminal = y;
  res.elapsed = t_last;
  res.converged = res.terminal_rhs_norm < rhs_tol;

  // candidate equilibria of the selected system; coexistence checked first
  std::vector<std::pair<MatchedEquilibrium, State3>> candidates;
  if (system == OdeSystem::Full || system == OdeSystem::HgtFree) {
    if (q.tau > 0) {
      try {
        if (auto co = coexistence_equilibrium(q))
          candidates.push_back({MatchedEquilibrium::Coexistence, *co});
      } catch (const AnalysisError&) {
      }
    }
    const auto t1 = trait1_equilibrium(q);
    candidates.push_back({MatchedEquilibrium::Trait1, {t1[0], t1[1], 0}});
    candidates.push_back(
        {MatchedEquilibrium::Trait2, {0, 0, trait2_equilibrium(q)}});
    candidates.push_back({MatchedEquilibrium::Origin, {0, 0, 0}});
  } else if (system == OdeSystem::DormancyFree) {
    if (auto co = coexistence_dormancy_free(q))
      candidates.push_back({MatchedEquilibrium::Coexistence, {(*co)[0], (*co)[1], 0}});
    candidates.push_back(
        {MatchedEquilibrium::Trait1,
         {std::max(q.lambda1 - q.mu, 0.0) / q.C, 0, 0}});
    candidates.push_back(
        {MatchedEquilibrium::Trait2, {0, trait2_equilibrium(q), 0}});
    candidates.push_back({MatchedEquilibrium::Origin, {0, 0, 0}});
  } else {  // Reduced
    try {
      if (auto co = coexistence_equilibrium(q))
        candidates.push_back(
            {MatchedEquilibrium::Coexistence, {(*co)[0], (*co)[1], 0}});
    } catch (const AnalysisError&) {
    }
    candidates.push_back({MatchedEquilibrium::Origin, {0, 0, 0}});
  }

  for (const auto& [label, point] : candidates) {
    if (dist3(res.terminal, point, dim) < match_tol) {
      res.matched = label;
      break;
    }
  }
  return res;
}

}  // namespace dormhgt
