#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "fleetopt/cost_model.hpp"
#include "fleetopt/ga.hpp"
#include "fleetopt/sim_params.hpp"

namespace fleetopt {

inline constexpr const char* kToolVersion = "fleetopt 1.0.0";
inline constexpr int kConfigFormatVersion = 1;

/// Everything a run needs besides the seed: scenario, costs, optimizer.
struct AppConfig {
    SimParams sim;
    CostParams cost;
    GaConfig ga;
};

AppConfig default_app_config();

nlohmann::json to_json(const AppConfig& cfg);

/// Parses a config document as a partial override of the defaults: absent
/// keys keep their default values. Demand profiles accept three forms:
/// {"kind":"matrix","rate":[[...24...]x7]}, {"kind":"shaped","mean_rate":r}
/// and {"kind":"constant","rate":r}.
AppConfig app_config_from_json(const nlohmann::json& j);

/// Loads the file when path is nonempty, otherwise returns defaults.
AppConfig load_app_config(const std::string& path);

void validate(const AppConfig& cfg);

/// Self-description written next to every command's outputs. Timestamps are
/// the only fields that differ between identical re-runs.
struct RunManifest {
    std::string command;
    std::string config_path;
    nlohmann::json config_snapshot;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string out_dir;
    std::string started_at;
    std::string finished_at;
    std::string status = "incomplete";

    nlohmann::json to_json() const;
};

std::string iso8601_now();

/// Writes manifest.json into manifest.out_dir.
void write_manifest(const RunManifest& manifest);

nlohmann::json solution_to_json(const SolutionVector& x);
SolutionVector solution_from_json(const nlohmann::json& j);

/// Accepts either 15 comma-separated gene values (owned x6, multiplier x6,
/// parking x3) or a path to a JSON document.
SolutionVector parse_solution_arg(const std::string& inline_genes,
                                  const std::string& json_path);

} // namespace fleetopt
