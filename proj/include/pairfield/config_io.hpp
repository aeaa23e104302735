#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "physconfig.hpp"

// JSON schema of a run configuration:
//
//   {
//     "field":    { "omega": 0.746,
//                   "e_peak": 0.3769,              // or "e_volts_per_meter": 4.9e17
//                   "alpha_plus": 0.157,
//                   "alpha_minus": 1.414,          // optional, derived from the relation
//                   "helicity_relation": "same" }, // "same" | "opposite"
//     "window":   { "ramp_cycles": 5, "plateau_cycles": 20 },
//     "numerics": { "n_cut": 4,
//                   "steps_per_cycle": 1024,       // optional from here on
//                   "k0": [0, 0, 0],
//                   "prune_threshold": 1e-6,
//                   "n_sector_max": 4,
//                   "unitarity_tol": 1e-10,
//                   "cond_cap": 1e12,
//                   "enumeration_budget": 1e9 }
//   }
namespace pairfield {

nlohmann::json to_json(RunConfig const &config);

/// Parses and validates. Missing required keys and type errors are reported as
/// ValidationError.
RunConfig config_from_json(nlohmann::json const &j);

RunConfig load_config(std::filesystem::path const &path);
void save_config(std::filesystem::path const &path, RunConfig const &config);

} // namespace pairfield
