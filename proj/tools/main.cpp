// Command-line front end. Everything goes through the C API in
// dormhgt/capi.h; this translation unit owns flag parsing, config-file
// merging, and file output only.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dormhgt/capi.h"

using nlohmann::json;

namespace {

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { dh_string_free(s); }
};

struct ModelGuard {
  dh_model* m = nullptr;
  ~ModelGuard() { dh_model_free(m); }
};

int fail(dh_status status) {
  std::cerr << "error: " << dh_last_error() << "\n";
  switch (status) {
    case DH_ERR_INAPPLICABLE: return 2;
    default: return 1;
  }
}

void write_output(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << payload;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    static const char* allowed[] = {"model",  "seed",       "threads",
                                    "out",    "classify",   "ode",
                                    "ssa",    "invade",     "regime_map",
                                    "branching"};
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw std::runtime_error("config: unknown key '" + key + "'");
  }
  return j;
}

// One CLI option per model parameter; set flags override config values.
struct ModelFlags {
  std::optional<double> lambda1, lambda2, mu, C, p, kappa, sigma, tau;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda1", lambda1, "birth rate of active trait 1");
    cmd->add_option("--lambda2", lambda2, "birth rate of trait 2");
    cmd->add_option("--mu", mu, "death rate of active individuals");
    cmd->add_option("--C", C, "competition strength");
    cmd->add_option("--p", p, "dormancy initiation probability");
    cmd->add_option("--kappa", kappa, "dormant death rate factor");
    cmd->add_option("--sigma", sigma, "resuscitation rate");
    cmd->add_option("--tau", tau, "horizontal transfer rate");
  }

  json merge(const json& config) const {
    json m = config.value("model", json::object());
    auto put = [&](const char* key, const std::optional<double>& v) {
      if (v) m[key] = *v;
    };
    put("lambda1", lambda1);
    put("lambda2", lambda2);
    put("mu", mu);
    put("C", C);
    put("p", p);
    put("kappa", kappa);
    put("sigma", sigma);
    put("tau", tau);
    return m;
  }
};

dh_status make_model(const json& model_json, ModelGuard& guard) {
  return dh_model_from_json(model_json.dump().c_str(), &guard.m);
}

// Effective-config echo embedded in JSON reports; re-parses to the same
// configuration byte for byte (flags override config, so the echo carries
// the top-level seed/threads the command actually used).
json config_echo(const json& model_json, std::uint64_t seed, int threads,
                 const std::string& cmd, const json& options) {
  json echo;
  echo["model"] = model_json;
  echo["seed"] = seed;
  echo["threads"] = threads;
  if (!options.empty()) echo[cmd] = options;
  return echo;
}

std::string with_config(const char* report_json, const json& echo) {
  json j = json::parse(report_json);
  j["config"] = echo;
  return j.dump(2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dormhgt: two-trait dormancy/HGT population dynamics toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, out_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> threads_flag;
  app.add_option("--config", config_path, "JSON config file")
      ->expected(1);
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_option("--seed", seed_flag, "base RNG seed");
  app.add_option("--threads", threads_flag, "worker threads");

  ModelFlags model_flags;

  auto* classify = app.add_subcommand("classify",
                                      "equilibria, fitness, stability, regime");
  model_flags.attach(classify);

  auto* ode = app.add_subcommand("ode", "integrate the limiting system");
  model_flags.attach(ode);
  std::string ode_system = "full";
  std::vector<double> ode_init;
  std::optional<double> ode_tmax, ode_rtol, ode_atol, ode_match_tol, ode_tcap;
  std::optional<int> ode_samples;
  bool ode_converge = false;
  ode->add_option("--system", ode_system, "full|p0|tau0|reduced");
  ode->add_option("--init", ode_init, "initial densities")->expected(2, 3);
  ode->add_option("--t-max", ode_tmax, "integration horizon");
  ode->add_option("--samples", ode_samples, "number of CSV samples");
  ode->add_option("--rtol", ode_rtol, "relative tolerance");
  ode->add_option("--atol", ode_atol, "absolute tolerance");
  ode->add_flag("--converge", ode_converge, "emit ConvergenceResult JSON");
  ode->add_option("--match-tol", ode_match_tol, "equilibrium match tolerance");
  ode->add_option("--t-cap", ode_tcap, "convergence time cap");

  auto* ssa = app.add_subcommand("ssa", "exact stochastic simulation");
  model_flags.attach(ssa);
  std::optional<double> ssa_k, ssa_dt, ssa_tcap, ssa_beta, ssa_level_x;
  std::vector<std::int64_t> ssa_init;
  std::optional<std::uint64_t> ssa_event_cap;
  std::optional<int> ssa_mutant_extinct, ssa_level_trait;
  bool ssa_fix1 = false, ssa_fix2 = false, ssa_coex = false,
       ssa_scaled = false;
  std::string ssa_traj_out;
  ssa->add_option("--K", ssa_k, "carrying capacity");
  ssa->add_option("--init", ssa_init, "initial counts N1a N1d N2")
      ->expected(3);
  ssa->add_option("--sample-dt", ssa_dt, "trajectory sampling step");
  ssa->add_option("--t-cap", ssa_tcap, "time cap");
  ssa->add_option("--event-cap", ssa_event_cap, "event cap");
  ssa->add_option("--stop-mutant-extinct", ssa_mutant_extinct,
                  "stop when this trait's count hits 0 (1|2)");
  ssa->add_option("--stop-level-trait", ssa_level_trait,
                  "trait for threshold stop (1|2)");
  ssa->add_option("--stop-level-x", ssa_level_x,
                  "threshold as fraction of K");
  ssa->add_flag("--stop-fix1", ssa_fix1, "stop in the trait-1 fixation set");
  ssa->add_flag("--stop-fix2", ssa_fix2, "stop in the trait-2 fixation set");
  ssa->add_flag("--stop-coex", ssa_coex, "stop in the coexistence set");
  ssa->add_option("--beta", ssa_beta, "set half-width");
  ssa->add_flag("--scaled", ssa_scaled, "trajectory CSV in densities");
  ssa->add_option("--traj-out", ssa_traj_out, "trajectory CSV path");

  auto* invade = app.add_subcommand("invade", "Monte Carlo invasion study");
  model_flags.attach(invade);
  std::string invade_direction;
  std::vector<double> invade_k_list;
  std::optional<std::uint64_t> invade_trials, invade_event_cap;
  std::optional<double> invade_beta, invade_tcap;
  std::string invade_csv_out, invade_trials_out;
  invade->add_option("--direction", invade_direction, "2into1|1into2");
  invade->add_option("--K-list", invade_k_list, "carrying capacities");
  invade->add_option("--trials", invade_trials, "trials per K");
  invade->add_option("--beta", invade_beta, "fixation set half-width");
  invade->add_option("--t-cap", invade_tcap, "per-trial time cap");
  invade->add_option("--event-cap", invade_event_cap, "per-trial event cap");
  invade->add_option("--csv-out", invade_csv_out, "per-K summary CSV path");
  invade->add_option("--trials-out", invade_trials_out, "per-trial CSV path");

  auto* rmap = app.add_subcommand("regime-map", "regime label grid CSV");
  model_flags.attach(rmap);
  std::vector<double> rmap_l1, rmap_l2;
  rmap->add_option("--grid-lambda1", rmap_l1, "min max n")->expected(3);
  rmap->add_option("--grid-lambda2", rmap_l2, "min max n")->expected(3);

  auto* branching = app.add_subcommand("branching",
                                       "invasion fitness + extinction report");
  model_flags.attach(branching);
  std::optional<std::uint64_t> br_verify, br_event_cap, br_threshold;
  branching->add_option("--verify-mc", br_verify,
                        "Monte Carlo verification trials");
  branching->add_option("--event-cap", br_event_cap, "per-trial event cap");
  branching->add_option("--survival-threshold", br_threshold,
                        "size that counts as survival");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage/config errors exit 1
  }

  try {
    const json config = load_config(config_path);
    const json model_json = model_flags.merge(config);
    const std::uint64_t seed =
        seed_flag ? *seed_flag : config.value("seed", std::uint64_t{1});
    const int threads = threads_flag ? *threads_flag : config.value("threads", 1);
    if (out_path.empty()) out_path = config.value("out", std::string{});

    ModelGuard model;
    if (dh_status s = make_model(model_json, model)) return fail(s);

    if (classify->parsed()) {
      StringGuard out;
      const dh_status s = dh_classify_json(model.m, &out.s);
      if (s != DH_OK && s != DH_ERR_INAPPLICABLE) return fail(s);
      write_output(out_path,
                   with_config(out.s, config_echo(model_json, seed, threads,
                                              "classify", json::object())));
      return s == DH_OK ? 0 : 2;
    }

    if (ode->parsed()) {
      json opts = config.value("ode", json::object());
      if (ode->count("--system")) opts["system"] = ode_system;
      if (!ode_init.empty()) opts["init"] = ode_init;
      if (ode_tmax) opts["t_max"] = *ode_tmax;
      if (ode_samples) opts["samples"] = *ode_samples;
      if (ode_rtol) opts["rtol"] = *ode_rtol;
      if (ode_atol) opts["atol"] = *ode_atol;
      if (ode_match_tol) opts["match_tol"] = *ode_match_tol;
      if (ode_tcap) opts["t_cap"] = *ode_tcap;
      const bool want_converge =
          ode_converge || opts.value("converge", false);
      opts.erase("converge");
      StringGuard out;
      if (want_converge) {
        if (dh_status s =
                dh_ode_converge_json(model.m, opts.dump().c_str(), &out.s))
          return fail(s);
        opts["converge"] = true;
        write_output(out_path,
                     with_config(out.s, config_echo(model_json, seed, threads, "ode", opts)));
      } else {
        if (dh_status s = dh_ode_csv(model.m, opts.dump().c_str(), &out.s))
          return fail(s);
        write_output(out_path, out.s);
      }
      return 0;
    }

    if (ssa->parsed()) {
      json opts = config.value("ssa", json::object());
      if (ssa_k) opts["K"] = *ssa_k;
      if (!ssa_init.empty()) opts["init"] = ssa_init;
      opts["seed"] = seed;
      if (ssa_dt) opts["sample_dt"] = *ssa_dt;
      if (ssa_tcap) opts["t_cap"] = *ssa_tcap;
      if (ssa_event_cap) opts["event_cap"] = *ssa_event_cap;
      if (ssa_scaled) opts["scaled"] = true;
      json stop = opts.value("stop", json::object());
      if (ssa_mutant_extinct) stop["mutant_extinct"] = *ssa_mutant_extinct;
      if (ssa_level_trait) stop["level_trait"] = *ssa_level_trait;
      if (ssa_level_x) stop["level_x"] = *ssa_level_x;
      if (ssa_fix1) stop["fix1"] = true;
      if (ssa_fix2) stop["fix2"] = true;
      if (ssa_coex) stop["coex"] = true;
      if (ssa_beta) stop["beta"] = *ssa_beta;
      if (!stop.empty()) opts["stop"] = stop;
      StringGuard outcome, traj;
      if (dh_status s =
              dh_ssa_run(model.m, opts.dump().c_str(), &outcome.s, &traj.s))
        return fail(s);
      write_output(out_path,
                   with_config(outcome.s,
                               config_echo(model_json, seed, threads, "ssa", opts)));
      if (traj.s && !ssa_traj_out.empty()) write_output(ssa_traj_out, traj.s);
      return 0;
    }

    if (invade->parsed()) {
      json opts = config.value("invade", json::object());
      if (!invade_direction.empty()) opts["direction"] = invade_direction;
      if (!invade_k_list.empty()) opts["K_list"] = invade_k_list;
      if (invade_trials) opts["trials"] = *invade_trials;
      if (invade_beta) opts["beta"] = *invade_beta;
      if (invade_tcap) opts["t_cap"] = *invade_tcap;
      if (invade_event_cap) opts["event_cap"] = *invade_event_cap;
      opts["seed"] = seed;
      opts["threads"] = threads;
      if (!invade_trials_out.empty()) opts["per_trial"] = true;
      StringGuard summary, csv, per_trial;
      if (dh_status s = dh_invade_json(model.m, opts.dump().c_str(),
                                       &summary.s, &csv.s, &per_trial.s))
        return fail(s);
      write_output(out_path, with_config(summary.s,
                                         config_echo(model_json, seed, threads,
                                                     "invade", opts)));
      if (!invade_csv_out.empty()) write_output(invade_csv_out, csv.s);
      if (per_trial.s && !invade_trials_out.empty())
        write_output(invade_trials_out, per_trial.s);
      return 0;
    }

    if (rmap->parsed()) {
      json opts = config.value("regime_map", json::object());
      if (!rmap_l1.empty()) opts["lambda1"] = rmap_l1;
      if (!rmap_l2.empty()) opts["lambda2"] = rmap_l2;
      StringGuard out;
      if (dh_status s = dh_regime_map_csv(model.m, opts.dump().c_str(), &out.s))
        return fail(s);
      write_output(out_path, out.s);
      return 0;
    }

    if (branching->parsed()) {
      json opts = config.value("branching", json::object());
      if (br_verify) opts["verify_mc"] = *br_verify;
      if (br_event_cap) opts["event_cap"] = *br_event_cap;
      if (br_threshold) opts["survival_threshold"] = *br_threshold;
      opts["seed"] = seed;
      opts["threads"] = threads;
      StringGuard out;
      const dh_status s = dh_branching_json(model.m, opts.dump().c_str(),
                                            &out.s);
      if (s != DH_OK && s != DH_ERR_INAPPLICABLE) return fail(s);
      write_output(out_path, with_config(out.s,
                                   config_echo(model_json, seed, threads,
                                               "branching", opts)));
      return s == DH_OK ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
