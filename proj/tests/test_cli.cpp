// End-to-end checks of the installed CLI binary; the path arrives in the
// DORMHGT_CLI environment variable set by CTest.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("DORMHGT_CLI");
  REQUIRE_MESSAGE(p != nullptr, "DORMHGT_CLI not set");
  return p;
}

struct RunResult {
  int exit_code;
  std::string out_file;
};

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp_path(const std::string& name) {
  return "cli_test_" + name;
}

const std::string kFounderFlags =
    "--lambda1 2 --lambda2 2.054 --mu 1 --C 1 --p 0.1 --kappa 0 --sigma 0.9 "
    "--tau 0.05";

}  // namespace

TEST_CASE("classify: regime I report, exit code 0") {
  const std::string out = tmp_path("classify.json");
  const int code = run_cli("--out " + out + " classify " + kFounderFlags);
  CHECK(code == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("regime") == "I");
  CHECK(j.at("status") == "ok");
  // config echo re-parses to the identical model block
  const json echo = j.at("config").at("model");
  CHECK(echo.at("lambda2") == 2.054);
  std::remove(out.c_str());
}

TEST_CASE("classify: unfit resident exits 2 with a structured report") {
  const std::string out = tmp_path("unfit.json");
  const int code = run_cli(
      "--out " + out +
      " classify --lambda1 0.5 --lambda2 0.6 --mu 1 --C 1 --p 0.1 --kappa 0 "
      "--sigma 0.9 --tau 0.05");
  CHECK(code == 2);
  CHECK(json::parse(slurp(out)).at("status") == "resident-unfit");
  std::remove(out.c_str());
}

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli("classify --lambda1 2 --no-such-flag 1") == 1);
  CHECK(run_cli("classify --lambda1 2") == 1);  // missing parameters
  CHECK(run_cli("ode " + kFounderFlags) == 1);  // missing init
}

TEST_CASE("ode: trajectory CSV and converge JSON") {
  const std::string out = tmp_path("traj.csv");
  const int code = run_cli(
      "--out " + out +
      " ode --system p0 --init 0.1 2.5 --t-max 40 --samples 9 "
      "--lambda1 5 --lambda2 3 --mu 2 --C 1 --p 0 --kappa 0 --sigma 1 "
      "--tau 1");
  CHECK(code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("t,n1a,n1d,n2\n", 0) == 0);
  std::remove(out.c_str());

  const std::string conv = tmp_path("conv.json");
  const int code2 = run_cli(
      "--out " + conv +
      " ode --system p0 --init 0.1 2.5 --converge "
      "--lambda1 5 --lambda2 3 --mu 2 --C 1 --p 0 --kappa 0 --sigma 1 "
      "--tau 1");
  CHECK(code2 == 0);
  const json j = json::parse(slurp(conv));
  CHECK(j.at("matched") == "coexistence");
  CHECK(j.at("config").at("ode").at("converge") == true);
  std::remove(conv.c_str());
}

TEST_CASE("ssa: outcome JSON is byte-identical across reruns") {
  const std::string out1 = tmp_path("ssa1.json");
  const std::string out2 = tmp_path("ssa2.json");
  const std::string traj1 = tmp_path("ssa1.csv");
  const std::string traj2 = tmp_path("ssa2.csv");
  const std::string args =
      " ssa --K 300 --init 150 30 60 --sample-dt 0.5 --t-cap 2 --seed 33 "
      "--traj-out ";
  CHECK(run_cli("--out " + out1 + args + traj1 + " " + kFounderFlags) == 0);
  CHECK(run_cli("--out " + out2 + args + traj2 + " " + kFounderFlags) == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(traj1) == slurp(traj2));
  CHECK(json::parse(slurp(out1)).at("stop") == "time-cap");
  for (const auto& f : {out1, out2, traj1, traj2}) std::remove(f.c_str());
}

TEST_CASE("invade: summary JSON plus per-K CSV; trials=0 rejected") {
  const std::string out = tmp_path("invade.json");
  const std::string csv = tmp_path("invade.csv");
  const int code = run_cli(
      "--out " + out + " --seed 6 --threads 2 invade --direction 2into1 "
      "--K-list 300 --trials 30 --csv-out " + csv + " --lambda1 3 "
      "--lambda2 2.8 --mu 1 --C 1 --p 0.3 --kappa 0 --sigma 1 --tau 1");
  CHECK(code == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("rows")[0].at("trials") == 30);
  CHECK(slurp(csv).rfind("K,", 0) == 0);
  std::remove(out.c_str());
  std::remove(csv.c_str());
  CHECK(run_cli("invade --K-list 300 --trials 0 " + kFounderFlags) == 1);
}

TEST_CASE("regime-map grid and config file merging") {
  // write a config file carrying the model; CLI flags override tau
  const std::string cfg = tmp_path("config.json");
  {
    std::ofstream f(cfg);
    f << R"({"model":{"lambda1":2,"lambda2":2,"mu":1,"C":1,"p":0.05,
             "kappa":0,"sigma":1,"tau":0.8},
             "regime_map":{"lambda1":[1.5,6,8],"lambda2":[0.2,6,8]}})";
  }
  const std::string out = tmp_path("map.csv");
  CHECK(run_cli("--config " + cfg + " --out " + out + " regime-map") == 0);
  const std::string csv08 = slurp(out);
  CHECK(csv08.rfind("lambda1,lambda2,regime\n", 0) == 0);
  CHECK(csv08.find("III'") == std::string::npos);  // tau < C: no III'
  CHECK(run_cli("--config " + cfg + " --out " + out +
                " regime-map --tau 1.2") == 0);
  CHECK(slurp(out).find("III'") != std::string::npos);
  std::remove(cfg.c_str());
  std::remove(out.c_str());
}

TEST_CASE("emitted config echo re-parses to the identical run") {
  const std::string out1 = tmp_path("echo1.json");
  const std::string out2 = tmp_path("echo2.json");
  const std::string cfg = tmp_path("echo_config.json");
  REQUIRE(run_cli("--out " + out1 + " classify " + kFounderFlags) == 0);
  const json first = json::parse(slurp(out1));
  {
    std::ofstream f(cfg);
    f << first.at("config").dump();
  }
  REQUIRE(run_cli("--config " + cfg + " --out " + out2 + " classify") == 0);
  CHECK(slurp(out1) == slurp(out2));  // byte-identical report

  // same round trip through a seeded stochastic command
  REQUIRE(run_cli("--out " + out1 + " --seed 17 invade --direction 2into1 "
                  "--K-list 200 --trials 20 --lambda1 3 --lambda2 2.8 --mu 1 "
                  "--C 1 --p 0.3 --kappa 0 --sigma 1 --tau 1") == 0);
  {
    std::ofstream f(cfg);
    f << json::parse(slurp(out1)).at("config").dump();
  }
  REQUIRE(run_cli("--config " + cfg + " --out " + out2 + " invade") == 0);
  CHECK(slurp(out1) == slurp(out2));
  for (const auto& f : {out1, out2, cfg}) std::remove(f.c_str());
}

TEST_CASE("branching: critical parameters exit 2") {
  const std::string out = tmp_path("branching.json");
  // tau = C and lambda2 = mu make lambda_hat exactly zero
  const int code = run_cli(
      "--out " + out +
      " branching --lambda1 3 --lambda2 1 --mu 1 --C 1 --p 0.4 --kappa 0.1 "
      "--sigma 0.9 --tau 1");
  CHECK(code == 2);
  CHECK(json::parse(slurp(out)).at("status") == "critical");
  std::remove(out.c_str());

  const int ok = run_cli("--out " + out +
                         " branching --verify-mc 2000 --lambda1 3 "
                         "--lambda2 2.8 --mu 1 --C 1 --p 0.3 --kappa 0 "
                         "--sigma 1 --tau 1");
  CHECK(ok == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("fitness").at("q2") == doctest::Approx(0.681818181818).epsilon(1e-9));
  CHECK(j.at("mc").contains("trait2"));
  std::remove(out.c_str());
}
