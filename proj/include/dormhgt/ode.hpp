#ifndef DORMHGT_ODE_HPP
#define DORMHGT_ODE_HPP

#include <string>
#include <vector>

#include "dormhgt/equilibria.hpp"
#include "dormhgt/params.hpp"

namespace dormhgt {

// Which limiting system to integrate. Full and HgtFree are 3-dimensional
// (n1a, n1d, n2); DormancyFree is (n1, n2) and Reduced is the diagnostic
// (n1a, n1d) system obtained by pinning the competitive pressure felt by
// trait 2 at lambda2 - mu.
enum class OdeSystem { Full, DormancyFree, HgtFree, Reduced };

OdeSystem ode_system_from_string(const std::string& name);
const char* to_string(OdeSystem system);

int ode_dimension(OdeSystem system);

// Derivatives, written so the special cases agree bit-for-bit with the full
// system on shared coordinates (p = 0 / tau = 0 / axis states).
State3 rhs_full(const ModelParams& params, const State3& state);
std::array<double, 2> rhs_dormancy_free(const ModelParams& params,
                                        const std::array<double, 2>& state);
State3 rhs_hgt_free(const ModelParams& params, const State3& state);
std::array<double, 2> rhs_reduced(const ModelParams& params,
                                  const std::array<double, 2>& state);

// Uniform entry point; unused trailing coordinates are zero.
State3 rhs(const ModelParams& params, OdeSystem system, const State3& state);

struct StepControls {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 1e-4;
  double h_min = 1e-14;
  std::uint64_t max_steps = 50000000;
};

struct Trajectory {
  OdeSystem system = OdeSystem::Full;
  std::vector<double> times;
  std::vector<State3> states;
  std::uint64_t steps = 0;          // accepted steps
  std::uint64_t rejected = 0;
  double terminal_rhs_norm = 0;     // max |f_i| at the final state
};

// Adaptive Dormand-Prince RK5(4). Coordinates within atol below zero are
// clamped to zero; a larger undershoot means a solver fault and throws.
// sample_times must be increasing and within [t0, t_max]; the endpoints are
// always included.
Trajectory integrate(const ModelParams& params, OdeSystem system,
                     const State3& init, double t_max,
                     const StepControls& controls = {},
                     const std::vector<double>& sample_times = {});

enum class MatchedEquilibrium { Origin, Trait1, Trait2, Coexistence, None };

const char* to_string(MatchedEquilibrium m);

struct ConvergenceResult {
  State3 terminal{0, 0, 0};
  MatchedEquilibrium matched = MatchedEquilibrium::None;
  double terminal_rhs_norm = 0;
  double elapsed = 0;      // model time at termination
  bool converged = false;  // rhs norm dropped below rhs_tol before t_cap
};

// Integrates until max |f_i| < rhs_tol or t_cap, then matches the terminal
// state against the equilibria of the selected system within match_tol
// (Euclidean distance; coexistence takes precedence). Defaults to tighter
// step tolerances than integrate(): the solver noise floor sits at roughly
// rtol * |state| and must stay well below rhs_tol.
ConvergenceResult converge(const ModelParams& params, OdeSystem system,
                           const State3& init, double match_tol = 1e-6,
                           double t_cap = 1e4, double rhs_tol = 1e-10,
                           const StepControls& controls = {1e-12, 1e-14, 1e-4,
                                                           1e-16, 50000000});

}  // namespace dormhgt

#endif
