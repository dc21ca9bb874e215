#ifndef DORMHGT_SERIALIZE_HPP
#define DORMHGT_SERIALIZE_HPP

#include <string>

#include <json.hpp>

#include "dormhgt/experiments.hpp"
#include "dormhgt/ode.hpp"
#include "dormhgt/ssa.hpp"
#include "dormhgt/stability.hpp"

namespace dormhgt {

using nlohmann::json;

// Strict config parsing: unknown keys are rejected with std::invalid_argument.
void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where);

ModelParams model_from_json(const json& j);
json model_to_json(const ModelParams& params);

// Full analysis payload: equilibria + fitness + stability labels + regime.
// status is "ok" or "boundary"/"resident-unfit"/"critical"; inapplicable
// sub-reports are replaced by a reason string instead of failing the whole
// report.
json classify_report(const ModelParams& params);

json fitness_to_json(const FitnessReport& fit);
json equilibria_to_json(const EquilibriumReport& report);
json convergence_to_json(const ConvergenceResult& result);
json outcome_to_json(const SsaOutcome& outcome, double K);
json study_to_json(const ModelParams& params, const StudySummary& summary);
json branching_mc_to_json(const BranchingMcResult& result);

// CSV writers; comma separator, \n line endings, header row, doubles at
// full precision (%.17g).
std::string format_double(double x);
std::string trajectory_csv(const Trajectory& trajectory);
std::string count_trajectory_csv(const CountTrajectory& trajectory);
std::string scaled_trajectory_csv(const CountTrajectory& trajectory, double K);
std::string regime_map_csv(const RegimeGrid& grid);
std::string study_csv(const StudySummary& summary);
std::string trials_csv(const std::vector<TrialOutcome>& outcomes,
                       std::uint64_t base_seed, std::uint64_t k_index);

}  // namespace dormhgt

#endif
