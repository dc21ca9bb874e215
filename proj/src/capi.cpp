#include "dormhgt/capi.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "dormhgt/serialize.hpp"

using namespace dormhgt;

struct dh_model {
  ModelParams params;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs fn, translating exceptions into status codes + dh_last_error().
template <typename Fn>
dh_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const AnalysisError& e) {
    g_last_error = e.what();
    return DH_ERR_INAPPLICABLE;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return DH_ERR_USAGE;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return DH_ERR_USAGE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DH_ERR_RUNTIME;
  }
}

dh_status require(bool ok, const char* msg) {
  if (!ok) {
    g_last_error = msg;
    return DH_ERR_USAGE;
  }
  return DH_OK;
}

json parse_options(const char* options_json) {
  if (options_json == nullptr || options_json[0] == '\0')
    return json::object();
  return json::parse(options_json);
}

std::uint64_t get_u64(const json& j, const char* key, std::uint64_t dflt) {
  return j.contains(key) ? j.at(key).get<std::uint64_t>() : dflt;
}

double get_num(const json& j, const char* key, double dflt) {
  return j.contains(key) ? j.at(key).get<double>() : dflt;
}

int get_int(const json& j, const char* key, int dflt) {
  return j.contains(key) ? j.at(key).get<int>() : dflt;
}

}  // namespace

extern "C" {

const char* dh_version(void) { return "0.1.0"; }

const char* dh_last_error(void) { return g_last_error.c_str(); }

dh_status dh_model_create(const double params[8], dh_model** out) {
  if (dh_status s = require(params && out, "null argument")) return s;
  return guarded([&] {
    ModelParams q{params[0], params[1], params[2], params[3],
                  params[4], params[5], params[6], params[7]};
    validate(q);
    *out = new dh_model{q};
    return DH_OK;
  });
}

dh_status dh_model_from_json(const char* json_text, dh_model** out) {
  if (dh_status s = require(json_text && out, "null argument")) return s;
  return guarded([&] {
    *out = new dh_model{model_from_json(json::parse(json_text))};
    return DH_OK;
  });
}

void dh_model_free(dh_model* model) { delete model; }

dh_status dh_model_to_json(const dh_model* model, char** json_out) {
  if (dh_status s = require(model && json_out, "null argument")) return s;
  return guarded([&] {
    *json_out = dup_string(model_to_json(model->params).dump());
    return DH_OK;
  });
}

dh_status dh_trait2_equilibrium(const dh_model* model, double* bar_n2) {
  if (dh_status s = require(model && bar_n2, "null argument")) return s;
  return guarded([&] {
    *bar_n2 = trait2_equilibrium(model->params);
    return DH_OK;
  });
}

dh_status dh_trait1_equilibrium(const dh_model* model, double* bar_n1a,
                                double* bar_n1d) {
  if (dh_status s = require(model && bar_n1a && bar_n1d, "null argument"))
    return s;
  return guarded([&] {
    const auto t1 = trait1_equilibrium(model->params);
    *bar_n1a = t1[0];
    *bar_n1d = t1[1];
    return DH_OK;
  });
}

dh_status dh_coexistence_equilibrium(const dh_model* model, double out3[3],
                                     int* exists) {
  if (dh_status s = require(model && out3 && exists, "null argument"))
    return s;
  return guarded([&] {
    const auto co = coexistence_equilibrium(model->params);
    *exists = co.has_value() ? 1 : 0;
    if (co)
      for (int i = 0; i < 3; ++i) out3[i] = (*co)[i];
    return DH_OK;
  });
}

dh_status dh_lambda_hat(const dh_model* model, double* value) {
  if (dh_status s = require(model && value, "null argument")) return s;
  return guarded([&] {
    *value = lambda_hat(model->params);
    return DH_OK;
  });
}

dh_status dh_lambda_tilde(const dh_model* model, double* value) {
  if (dh_status s = require(model && value, "null argument")) return s;
  return guarded([&] {
    *value = lambda_tilde(model->params);
    return DH_OK;
  });
}

dh_status dh_q1(const dh_model* model, double* value) {
  if (dh_status s = require(model && value, "null argument")) return s;
  return guarded([&] {
    *value = q1(model->params);
    return DH_OK;
  });
}

dh_status dh_q2(const dh_model* model, double* value) {
  if (dh_status s = require(model && value, "null argument")) return s;
  return guarded([&] {
    *value = q2(model->params);
    return DH_OK;
  });
}

dh_status dh_pi_proportions(const dh_model* model, double* pi_active,
                            double* pi_dormant) {
  if (dh_status s = require(model && pi_active && pi_dormant, "null argument"))
    return s;
  return guarded([&] {
    const PiProportions pi = pi_proportions(model->params);
    *pi_active = pi.pi_active;
    *pi_dormant = pi.pi_dormant;
    return DH_OK;
  });
}

dh_status dh_regime(const dh_model* model, char* buf, size_t buf_len) {
  if (dh_status s = require(model && buf && buf_len > 0, "null argument"))
    return s;
  return guarded([&] {
    const char* label = to_string(regime(model->params));
    std::strncpy(buf, label, buf_len - 1);
    buf[buf_len - 1] = '\0';
    return DH_OK;
  });
}

dh_status dh_classify_json(const dh_model* model, char** json_out) {
  if (dh_status s = require(model && json_out, "null argument")) return s;
  return guarded([&] {
    const json report = classify_report(model->params);
    *json_out = dup_string(report.dump(2));
    const std::string status = report.at("status").get<std::string>();
    if (status != "ok") {
      g_last_error = "analysis inapplicable: " + status;
      return DH_ERR_INAPPLICABLE;
    }
    return DH_OK;
  });
}

namespace {

struct OdeOptions {
  OdeSystem system = OdeSystem::Full;
  State3 init{0, 0, 0};
  bool have_init = false;
  double t_max = 50;
  int samples = 200;
  StepControls controls;
  double match_tol = 1e-6;
  double t_cap = 1e4;
};

OdeOptions parse_ode_options(const json& j, const StepControls& base = {}) {
  check_keys(j,
             {"system", "init", "t_max", "samples", "rtol", "atol",
              "match_tol", "t_cap", "converge"},
             "ode");
  OdeOptions o;
  o.controls = base;
  if (j.contains("system"))
    o.system = ode_system_from_string(j.at("system").get<std::string>());
  if (j.contains("init")) {
    const auto v = j.at("init").get<std::vector<double>>();
    const int dim = ode_dimension(o.system);
    if (static_cast<int>(v.size()) != dim)
      throw std::invalid_argument("ode: init must have " +
                                  std::to_string(dim) + " coordinates");
    for (std::size_t i = 0; i < v.size(); ++i) o.init[i] = v[i];
    o.have_init = true;
  }
  o.t_max = get_num(j, "t_max", o.t_max);
  o.samples = get_int(j, "samples", o.samples);
  o.controls.rtol = get_num(j, "rtol", o.controls.rtol);
  o.controls.atol = get_num(j, "atol", o.controls.atol);
  o.match_tol = get_num(j, "match_tol", o.match_tol);
  o.t_cap = get_num(j, "t_cap", o.t_cap);
  if (!o.have_init) throw std::invalid_argument("ode: missing init");
  if (o.samples < 2) throw std::invalid_argument("ode: samples must be >= 2");
  return o;
}

}  // namespace

dh_status dh_ode_csv(const dh_model* model, const char* options_json,
                     char** csv_out) {
  if (dh_status s = require(model && csv_out, "null argument")) return s;
  return guarded([&] {
    const OdeOptions o = parse_ode_options(parse_options(options_json));
    std::vector<double> sample_times;
    for (int i = 1; i < o.samples; ++i)
      sample_times.push_back(o.t_max * i / (o.samples - 1));
    const Trajectory traj = integrate(model->params, o.system, o.init,
                                      o.t_max, o.controls, sample_times);
    *csv_out = dup_string(trajectory_csv(traj));
    return DH_OK;
  });
}

dh_status dh_ode_converge_json(const dh_model* model, const char* options_json,
                               char** json_out) {
  if (dh_status s = require(model && json_out, "null argument")) return s;
  return guarded([&] {
    const OdeOptions o = parse_ode_options(
        parse_options(options_json),
        StepControls{1e-12, 1e-14, 1e-4, 1e-16, 50000000});
    const ConvergenceResult res =
        converge(model->params, o.system, o.init, o.match_tol, o.t_cap, 1e-10,
                 o.controls);
    json j = convergence_to_json(res);
    j["system"] = to_string(o.system);
    *json_out = dup_string(j.dump(2));
    return DH_OK;
  });
}

dh_status dh_ssa_run(const dh_model* model, const char* options_json,
                     char** outcome_json_out, char** traj_csv_out) {
  if (dh_status s = require(model && outcome_json_out, "null argument"))
    return s;
  return guarded([&] {
    const json j = parse_options(options_json);
    check_keys(j,
               {"K", "init", "seed", "sample_dt", "t_cap", "event_cap",
                "scaled", "stop"},
               "ssa");
    const double K = get_num(j, "K", 1000);
    CountState init;
    if (!j.contains("init")) throw std::invalid_argument("ssa: missing init");
    {
      const auto v = j.at("init").get<std::vector<std::int64_t>>();
      if (v.size() != 3)
        throw std::invalid_argument("ssa: init must have 3 counts");
      init = {v[0], v[1], v[2]};
    }
    const std::uint64_t seed = get_u64(j, "seed", 1);
    const double sample_dt = get_num(j, "sample_dt", 0);
    const bool scaled = j.contains("scaled") && j.at("scaled").get<bool>();

    StopSpec stop;
    stop.t_cap = get_num(j, "t_cap", stop.t_cap);
    stop.event_cap = get_u64(j, "event_cap", stop.event_cap);
    if (j.contains("stop")) {
      const json& sj = j.at("stop");
      check_keys(sj,
                 {"mutant_extinct", "level_trait", "level_x", "fix1", "fix2",
                  "coex", "beta"},
                 "ssa.stop");
      const double beta = get_num(sj, "beta", 0.05);
      if (sj.contains("mutant_extinct"))
        stop.mutant_extinction_trait = sj.at("mutant_extinct").get<int>();
      if (sj.contains("level_trait") != sj.contains("level_x"))
        throw std::invalid_argument(
            "ssa.stop: level_trait and level_x go together");
      if (sj.contains("level_trait"))
        stop.level = {sj.at("level_trait").get<int>(),
                      sj.at("level_x").get<double>()};
      const EquilibriumReport eq = equilibrium_report(model->params);
      if (sj.contains("fix1") && sj.at("fix1").get<bool>()) {
        SetTarget box;
        box.center = {eq.bar_n1a, eq.bar_n1d, 0};
        box.must_be_zero = {false, false, true};
        box.beta = beta;
        stop.trait1_set = box;
      }
      if (sj.contains("fix2") && sj.at("fix2").get<bool>()) {
        SetTarget box;
        box.center = {0, 0, eq.bar_n2};
        box.must_be_zero = {true, true, false};
        box.beta = beta;
        stop.trait2_set = box;
      }
      if (sj.contains("coex") && sj.at("coex").get<bool>()) {
        if (!eq.coexistence_exists)
          throw AnalysisError("ssa.stop: no coexistence equilibrium exists");
        SetTarget box;
        box.center = eq.coexistence;
        box.beta = beta;
        stop.coex_set = box;
      }
    }

    const SsaRun res = run(seed, model->params, K, init, stop, sample_dt);
    json out = outcome_to_json(res.outcome, K);
    out["K"] = K;
    out["seed"] = seed;
    *outcome_json_out = dup_string(out.dump(2));
    if (traj_csv_out) {
      *traj_csv_out =
          sample_dt > 0
              ? dup_string(scaled ? scaled_trajectory_csv(res.trajectory, K)
                                  : count_trajectory_csv(res.trajectory))
              : nullptr;
    }
    return DH_OK;
  });
}

dh_status dh_branching_json(const dh_model* model, const char* options_json,
                            char** json_out) {
  if (dh_status s = require(model && json_out, "null argument")) return s;
  return guarded([&] {
    const json j = parse_options(options_json);
    check_keys(j,
               {"verify_mc", "seed", "threads", "event_cap",
                "survival_threshold"},
               "branching");
    const FitnessReport fit = fitness_report(model->params);
    json out{{"model", model_to_json(model->params)},
             {"fitness", fitness_to_json(fit)}};
    const std::uint64_t verify = get_u64(j, "verify_mc", 0);
    if (verify > 0) {
      const std::uint64_t seed = get_u64(j, "seed", 1);
      const int threads = get_int(j, "threads", 1);
      const std::uint64_t cap = get_u64(j, "event_cap", 10000000ULL);
      const std::uint64_t thr = get_u64(j, "survival_threshold", 10000ULL);
      json mc = json::object();
      if (fit.direction_2into1_defined && !fit.critical_hat)
        mc["trait2"] = branching_mc_to_json(branching_mc(
            model->params, 2, verify, cap, derive_seed(seed, 2), thr,
            threads));
      if (fit.direction_1into2_defined && !fit.critical_tilde)
        mc["trait1"] = branching_mc_to_json(branching_mc(
            model->params, 1, verify, cap, derive_seed(seed, 1), thr,
            threads));
      out["mc"] = mc;
    }
    // inapplicable only when nothing can be predicted at all
    const bool critical = fit.critical_hat || fit.critical_tilde;
    const bool no_direction =
        !fit.direction_2into1_defined && !fit.direction_1into2_defined;
    out["status"] =
        critical ? "critical" : no_direction ? "resident-unfit" : "ok";
    *json_out = dup_string(out.dump(2));
    if (critical || no_direction) {
      g_last_error =
          "analysis inapplicable: " + out.at("status").get<std::string>();
      return DH_ERR_INAPPLICABLE;
    }
    return DH_OK;
  });
}

dh_status dh_invade_json(const dh_model* model, const char* options_json,
                         char** json_out, char** csv_out,
                         char** trials_csv_out) {
  if (dh_status s = require(model && json_out, "null argument")) return s;
  return guarded([&] {
    const json j = parse_options(options_json);
    check_keys(j,
               {"direction", "K_list", "trials", "beta", "seed", "threads",
                "t_cap", "event_cap", "per_trial"},
               "invade");
    if (!j.contains("K_list"))
      throw std::invalid_argument("invade: missing K_list");
    const auto k_list = j.at("K_list").get<std::vector<double>>();
    const std::uint64_t trials = get_u64(j, "trials", 0);
    if (trials == 0)
      throw std::invalid_argument("invade: trials must be positive");
    const Direction direction = direction_from_string(
        j.contains("direction") ? j.at("direction").get<std::string>()
                                : "2into1");
    const double beta = get_num(j, "beta", 0.05);
    const std::uint64_t seed = get_u64(j, "seed", 1);
    const int threads = get_int(j, "threads", 1);
    const bool per_trial =
        j.contains("per_trial") && j.at("per_trial").get<bool>();
    TrialSettings settings;
    settings.t_cap = get_num(j, "t_cap", settings.t_cap);
    settings.event_cap = get_u64(j, "event_cap", settings.event_cap);

    const StudySummary summary =
        invasion_study(model->params, k_list, trials, direction, beta, seed,
                       threads, settings, per_trial);
    *json_out = dup_string(study_to_json(model->params, summary).dump(2));
    if (csv_out) *csv_out = dup_string(study_csv(summary));
    if (trials_csv_out) {
      if (per_trial) {
        std::string all;
        for (std::size_t ik = 0; ik < summary.raw.size(); ++ik)
          all += trials_csv(summary.raw[ik], seed, ik);
        *trials_csv_out = dup_string(all);
      } else {
        *trials_csv_out = nullptr;
      }
    }
    return DH_OK;
  });
}

dh_status dh_regime_map_csv(const dh_model* model, const char* options_json,
                            char** csv_out) {
  if (dh_status s = require(model && csv_out, "null argument")) return s;
  return guarded([&] {
    const json j = parse_options(options_json);
    check_keys(j, {"lambda1", "lambda2"}, "regime_map");
    auto axis = [&](const char* key, double& lo, double& hi, int& n) {
      if (!j.contains(key))
        throw std::invalid_argument(std::string("regime_map: missing ") + key);
      const auto v = j.at(key).get<std::vector<double>>();
      if (v.size() != 3)
        throw std::invalid_argument(std::string("regime_map: ") + key +
                                    " must be [min, max, n]");
      lo = v[0];
      hi = v[1];
      n = static_cast<int>(v[2]);
    };
    double l1lo, l1hi, l2lo, l2hi;
    int n1, n2;
    axis("lambda1", l1lo, l1hi, n1);
    axis("lambda2", l2lo, l2hi, n2);
    const RegimeGrid grid =
        regime_map(model->params, l1lo, l1hi, n1, l2lo, l2hi, n2);
    *csv_out = dup_string(regime_map_csv(grid));
    return DH_OK;
  });
}

void dh_string_free(char* s) { std::free(s); }

}  // extern "C"
