#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "multipair.hpp"
#include "physconfig.hpp"

/// Runs and parameter sweeps over interaction time, polarisation angle and
/// subspace momentum, with CSV/JSON output.
namespace pairfield {

struct ResultRow
{
  double sweep_value = 0;
  int plateau_cycles = 0;
  int total_cycles = 0;
  double total_time = 0; ///< hbar/m0
  double vacuum_probability = 0;
  std::vector<double> c;         ///< N = 0 .. n_sector_max
  std::vector<double> spin_plus; ///< N = 1 .. n_sector_max, NaN where c_N = 0
  std::vector<double> spin_minus;
  std::vector<double> helicity_plus;
  std::vector<double> helicity_minus;
  double top_pair_probability = 0;
  std::string top_pair_electron;
  std::string top_pair_positron;
  double unitarity_defect = 0;
  double column_defect = 0;
  double cond_gmm = 0;
  double discarded_mass = 0;
  bool pruning_flag = false;
  std::string error; ///< empty on success
};

struct RunResult
{
  RunConfig config;
  ResultRow row;
  SectorReport report;
};

/// Analyses a full-run propagator (field off at both ends).
RunResult analyze(RunConfig const &config, ModeBasis const &basis, Propagator const &u);

/// validate -> basis -> propagate -> G blocks -> sectors and observables.
RunResult run_once(RunConfig const &config);

enum class SweepAxis
{
  plateau_cycles,
  alpha_plus,
  k0_z,
};

struct SweepSpec
{
  RunConfig base;
  SweepAxis axis = SweepAxis::plateau_cycles;
  std::vector<double> values;
  std::filesystem::path output = "out";
  bool emit_sectors = true;
  bool emit_pairs = true;
  bool emit_gdump = false;
  /// Plateau sweeps reuse the turn-on, cycle and turn-off propagators.
  bool compose_plateau = true;
  int threads = 0; ///< 0: hardware concurrency
};

SweepSpec sweep_spec_from_json(nlohmann::json const &j);
SweepSpec load_sweep_spec(std::filesystem::path const &path);

/// Configuration of one sweep point.
RunConfig sweep_point_config(SweepSpec const &spec, double value);

struct SweepResult
{
  std::vector<ResultRow> rows; ///< ordered by sweep value as given
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
  int reused_points = 0;
};

/// Writes `output/results.csv`, `output/results.json` and a per-point cache
/// under `output/points/<config hash>.json`. Cached points are reused on
/// rerun. Failed points are recorded with their error and the sweep goes on.
SweepResult run_sweep(SweepSpec const &spec);

std::vector<std::string> csv_header(int n_sector_max);
void write_csv_header(std::ostream &out, int n_sector_max);
void write_csv_row(std::ostream &out, ResultRow const &row);

nlohmann::json row_to_json(ResultRow const &row);
ResultRow row_from_json(nlohmann::json const &j);
/// Full detail: row, configuration, retained pairs and top states per sector.
nlohmann::json result_to_json(RunResult const &result, ModeBasis const &basis);

struct Preset
{
  RunConfig config;
  /// Field paths whose values are artifact choices rather than reference
  /// parameters.
  std::vector<std::string> assumed;
  std::string description;
};

/// "fig2", "fig3" (same parameters as fig2), "fig4".
std::map<std::string, Preset> const &figure_configs();
Preset const &preset(std::string const &name);
nlohmann::json preset_to_json(std::string const &name, Preset const &p);

} // namespace pairfield
