#include "dormhgt/serialize.hpp"

#include <cinttypes>
#include <cstdio>

namespace dormhgt {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object())
    throw std::invalid_argument(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
}

ModelParams model_from_json(const json& j) {
  check_keys(j, {"lambda1", "lambda2", "mu", "C", "p", "kappa", "sigma", "tau"},
             "model");
  ModelParams q;
  auto get = [&](const char* key, double& slot) {
    if (!j.contains(key))
      throw std::invalid_argument(std::string("model: missing key '") + key +
                                  "'");
    if (!j.at(key).is_number())
      throw std::invalid_argument(std::string("model: key '") + key +
                                  "' must be a number");
    slot = j.at(key).get<double>();
  };
  get("lambda1", q.lambda1);
  get("lambda2", q.lambda2);
  get("mu", q.mu);
  get("C", q.C);
  get("p", q.p);
  get("kappa", q.kappa);
  get("sigma", q.sigma);
  get("tau", q.tau);
  validate(q);
  return q;
}

json model_to_json(const ModelParams& q) {
  return json{{"lambda1", q.lambda1}, {"lambda2", q.lambda2}, {"mu", q.mu},
              {"C", q.C},             {"p", q.p},             {"kappa", q.kappa},
              {"sigma", q.sigma},     {"tau", q.tau}};
}

json equilibria_to_json(const EquilibriumReport& r) {
  json j{{"bar_n1a", r.bar_n1a},
         {"bar_n1d", r.bar_n1d},
         {"bar_n2", r.bar_n2},
         {"tilde_n2", r.tilde_n2},
         {"coexistence_exists", r.coexistence_exists}};
  switch (r.which_condition) {
    case CoexistenceKind::None: j["which_condition"] = "none"; break;
    case CoexistenceKind::Unstable:
      j["which_condition"] = "founder-chain";
      break;
    case CoexistenceKind::Stable:
      j["which_condition"] = "coexistence-chain";
      break;
    case CoexistenceKind::Boundary: j["which_condition"] = "boundary"; break;
  }
  if (r.coexistence_exists)
    j["coexistence"] = {r.coexistence[0], r.coexistence[1], r.coexistence[2]};
  return j;
}

json fitness_to_json(const FitnessReport& f) {
  json j;
  if (f.direction_2into1_defined) {
    j["lambda_hat"] = f.lambda_hat;
    j["critical_hat"] = f.critical_hat;
    if (!f.critical_hat) j["q2"] = f.q2;
  } else {
    j["direction_2into1"] = "resident trait 1 unfit";
  }
  if (f.direction_1into2_defined) {
    j["lambda_tilde"] = f.lambda_tilde;
    j["critical_tilde"] = f.critical_tilde;
    if (!f.critical_tilde) j["q1"] = f.q1;
    if (f.pi_defined) {
      j["pi_1a"] = f.pi_active;
      j["pi_1d"] = f.pi_dormant;
      j["pi_degenerate"] = f.pi_degenerate;
    }
  } else {
    j["direction_1into2"] = "resident trait 2 unfit";
  }
  return j;
}

namespace {

json classification_to_json(const EquilibriumClassification& c) {
  json eig = json::array();
  for (const auto& e : c.eigenvalues)
    eig.push_back(json{{"re", e.real()}, {"im", e.imag()}});
  json j{{"point", {c.point[0], c.point[1], c.point[2]}},
         {"label", to_string(c.label)},
         {"eigenvalues", eig},
         {"trace", c.trace},
         {"det", c.det}};
  if (c.negative_coordinate) j["negative_coordinate"] = true;
  return j;
}

}  // namespace

json classify_report(const ModelParams& q) {
  json j;
  j["model"] = model_to_json(q);
  std::string status = "ok";

  try {
    j["equilibria"] = equilibria_to_json(equilibrium_report(q));
  } catch (const AnalysisError& err) {
    j["equilibria"] = err.what();
    status = "boundary";
  }
  const FitnessReport fit = fitness_report(q);
  j["fitness"] = fitness_to_json(fit);
  if (fit.critical_hat || fit.critical_tilde) status = "critical";

  try {
    json stab = json::object();
    for (const auto& c : classify_equilibria(q)) {
      stab[c.name] = classification_to_json(c);
      if (c.label == StabilityLabel::Boundary) status = "boundary";
    }
    j["stability"] = stab;
  } catch (const AnalysisError& err) {
    j["stability"] = err.what();
    status = "resident-unfit";
  }

  const RegimeLabel label = regime(q);
  j["regime"] = to_string(label);
  if (label == RegimeLabel::Boundary) status = "boundary";
  if (label == RegimeLabel::ResidentUnfit && status == "ok")
    status = "resident-unfit";

  if (q.tau > 0) {
    try {
      const CriticalLines lines = critical_lines(q);
      j["critical_lines"] = {
          {"orange",
           {{"a", lines.trait2_boundary.a},
            {"b", lines.trait2_boundary.b},
            {"c", lines.trait2_boundary.c},
            {"slope", lines.trait2_boundary.slope}}},
          {"blue",
           {{"a", lines.trait1_boundary.a},
            {"b", lines.trait1_boundary.b},
            {"c", lines.trait1_boundary.c},
            {"slope", lines.trait1_boundary.slope}}}};
    } catch (const AnalysisError& err) {
      j["critical_lines"] = err.what();
    }
  }

  j["status"] = status;
  return j;
}

json convergence_to_json(const ConvergenceResult& r) {
  return json{{"terminal", {r.terminal[0], r.terminal[1], r.terminal[2]}},
              {"matched", to_string(r.matched)},
              {"terminal_rhs_norm", r.terminal_rhs_norm},
              {"elapsed", r.elapsed},
              {"converged", r.converged}};
}

json outcome_to_json(const SsaOutcome& o, double K) {
  return json{{"stop", to_string(o.stop)},
              {"t", o.t},
              {"state", {o.state.n1a, o.state.n1d, o.state.n2}},
              {"scaled_state",
               {o.state.n1a / K, o.state.n1d / K, o.state.n2 / K}},
              {"events", o.events}};
}

json branching_mc_to_json(const BranchingMcResult& r) {
  return json{{"trials", r.trials},
              {"extinct", r.extinct},
              {"survived", r.survived},
              {"censored", r.censored},
              {"fraction_extinct", r.fraction_extinct},
              {"wilson95", {r.wilson_low, r.wilson_high}},
              {"std_error", r.std_error}};
}

namespace {

json row_to_json(const StudyRow& r) {
  return json{{"K", r.K},
              {"trials", r.trials},
              {"extinct", r.extinct},
              {"fixation", r.fixation},
              {"coexistence", r.coexistence},
              {"censored", r.censored},
              {"p_success", r.p_success},
              {"wilson95", {r.wilson_low, r.wilson_high}},
              {"theory_success", r.theory_success},
              {"mean_t_over_logK", r.mean_t_over_logk},
              {"se_t_over_logK", r.se_t_over_logk},
              {"median_t_over_logK", r.median_t_over_logk},
              {"mean_t0_over_logK", r.mean_t0_over_logk},
              {"se_t0_over_logK", r.se_t0_over_logk},
              {"theory_coex_const", r.theory_coex_const},
              {"theory_fix_const", r.theory_fix_const}};
}

}  // namespace

json study_to_json(const ModelParams& q, const StudySummary& s) {
  json rows = json::array();
  for (const auto& r : s.rows) rows.push_back(row_to_json(r));
  return json{{"model", model_to_json(q)},
              {"direction", to_string(s.direction)},
              {"beta", s.beta},
              {"seed", s.base_seed},
              {"rows", rows}};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,n1a,n1d,n2\n";
  const int dim = ode_dimension(traj.system);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_double(traj.times[i]);
    const auto& s = traj.states[i];
    if (traj.system == OdeSystem::DormancyFree) {
      // planar system: (n1, n2) reported as (n1a, 0, n2)
      out += ',' + format_double(s[0]) + ",0," + format_double(s[1]);
    } else {
      for (int d = 0; d < 3; ++d)
        out += ',' + format_double(d < dim ? s[d] : 0.0);
    }
    out += '\n';
  }
  return out;
}

std::string count_trajectory_csv(const CountTrajectory& traj) {
  std::string out = "t,N1a,N1d,N2\n";
  char buf[96];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    std::snprintf(buf, sizeof(buf), "%s,%" PRId64 ",%" PRId64 ",%" PRId64 "\n",
                  format_double(traj.times[i]).c_str(), s.n1a, s.n1d, s.n2);
    out += buf;
  }
  return out;
}

std::string scaled_trajectory_csv(const CountTrajectory& traj, double K) {
  std::string out = "t,n1a,n1d,n2\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    out += format_double(traj.times[i]) + ',' + format_double(s.n1a / K) +
           ',' + format_double(s.n1d / K) + ',' + format_double(s.n2 / K) +
           '\n';
  }
  return out;
}

std::string regime_map_csv(const RegimeGrid& grid) {
  std::string out = "lambda1,lambda2,regime\n";
  for (std::size_t i = 0; i < grid.lambda1.size(); ++i)
    for (std::size_t j = 0; j < grid.lambda2.size(); ++j) {
      out += format_double(grid.lambda1[i]) + ',' +
             format_double(grid.lambda2[j]) + ',' +
             to_string(grid.labels[i * grid.lambda2.size() + j]);
      out += '\n';
    }
  return out;
}

std::string study_csv(const StudySummary& s) {
  std::string out =
      "K,trials,extinct,fixation,coexistence,censored,p_success,wilson_low,"
      "wilson_high,theory_success,mean_t_over_logK,se_t_over_logK,"
      "median_t_over_logK,mean_t0_over_logK,se_t0_over_logK,"
      "theory_coex_const,theory_fix_const\n";
  char buf[64];
  for (const auto& r : s.rows) {
    out += format_double(r.K);
    std::snprintf(buf, sizeof(buf), ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                  ",%" PRIu64 ",%" PRIu64,
                  r.trials, r.extinct, r.fixation, r.coexistence, r.censored);
    out += buf;
    for (double v :
         {r.p_success, r.wilson_low, r.wilson_high, r.theory_success,
          r.mean_t_over_logk, r.se_t_over_logk, r.median_t_over_logk,
          r.mean_t0_over_logk, r.se_t0_over_logk, r.theory_coex_const,
          r.theory_fix_const})
      out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

std::string trials_csv(const std::vector<TrialOutcome>& outcomes,
                       std::uint64_t base_seed, std::uint64_t k_index) {
  std::string out = "trial,seed,kind,t,N1a,N1d,N2\n";
  char buf[128];
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    const std::uint64_t seed = derive_seed(base_seed, (k_index << 32) + i);
    std::snprintf(buf, sizeof(buf),
                  "%zu,%" PRIu64 ",%s,%s,%" PRId64 ",%" PRId64 ",%" PRId64
                  "\n",
                  i, seed, to_string(o.kind), format_double(o.t).c_str(),
                  o.state.n1a, o.state.n1d, o.state.n2);
    out += buf;
  }
  return out;
}

}  // namespace dormhgt
