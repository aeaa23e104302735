#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pairfield/config_io.hpp"
#include "pairfield/dynamics.hpp"
#include "pairfield/fieldmodel.hpp"
#include "pairfield/fockoracle.hpp"
#include "pairfield/modebasis.hpp"
#include "pairfield/multipair.hpp"
#include "pairfield/runner.hpp"

namespace fs = std::filesystem;
using namespace pairfield;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr char const *kOutputEnv = "PAIRFIELD_OUTPUT_DIR";

fs::path output_dir(fs::path const &fallback)
{
  if (char const *env = std::getenv(kOutputEnv); env && *env)
    return env;
  return fallback;
}

RunConfig load_run_config(std::string const &config_file, std::string const &preset_name)
{
  if (!preset_name.empty())
    return preset(preset_name).config;
  return load_config(config_file);
}

int cmd_run(std::string const &config_file, std::string const &preset_name, std::string const &out)
{
  RunConfig const config = load_run_config(config_file, preset_name);
  RunResult const r = run_once(config);
  ModeBasis const basis = build_basis(config.numerics, config.field);
  fs::path const dir = output_dir(out);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "run.csv");
    write_csv_header(csv, config.numerics.n_sector_max);
    write_csv_row(csv, r.row);
  }
  {
    std::ofstream js(dir / "run.json");
    js << result_to_json(r, basis).dump(1) << '\n';
  }
  write_csv_header(std::cout, config.numerics.n_sector_max);
  write_csv_row(std::cout, r.row);
  return 0;
}

int cmd_sweep(std::string const &spec_file, std::string const &out)
{
  SweepSpec spec = load_sweep_spec(spec_file);
  if (!out.empty())
    spec.output = out;
  spec.output = output_dir(spec.output);
  SweepResult const r = run_sweep(spec);
  int failed = 0;
  for (auto const &row : r.rows)
    failed += row.error.empty() ? 0 : 1;
  std::cerr << "sweep: " << r.rows.size() << " points (" << r.reused_points << " reused, " << failed
            << " failed) -> " << r.csv_path.string() << "\n";
  return 0;
}

int cmd_preset(std::string const &name, bool emit_config)
{
  if (name.empty()) {
    for (auto const &[n, p] : figure_configs())
      std::cout << n << ": " << p.description << "\n";
    return 0;
  }
  Preset const &p = preset(name);
  if (emit_config)
    std::cout << preset_to_json(name, p).dump(2) << "\n";
  else
    std::cout << name << ": " << p.description << "\n";
  return 0;
}

int cmd_oracle_check(std::string const &config_file, std::string const &preset_name)
{
  RunConfig const config = validate(load_run_config(config_file, preset_name));
  ModeBasis const basis = build_basis(config.numerics, config.field);
  Propagator const u = propagate(config, basis);
  GBlocks const g = extract_g_blocks(u, basis);
  PairAmplitudeMatrix const omega = pair_amplitudes(g, config.numerics.cond_cap);
  VacuumAmplitude const c_v = vacuum_amplitude(g);
  OracleRun const oracle = propagate_vacuum(config, basis);

  double worst = std::abs(read_amplitude(oracle.state, oracle.fock, {}, {}) - c_v.c_v);
  int const half = static_cast<int>(basis.half_size());
  for (int m = 0; m < half; ++m) {
    for (int n = 0; n < half; ++n) {
      int const e[1] = {m}, p[1] = {n};
      worst = std::max(worst, std::abs(read_amplitude(oracle.state, oracle.fock, e, p) -
                                       multi_pair_amplitude(omega, c_v, e, p).amplitude));
    }
  }
  for (int m1 = 0; m1 < half; ++m1)
    for (int m2 = m1 + 1; m2 < half; ++m2)
      for (int n1 = 0; n1 < half; ++n1)
        for (int n2 = n1 + 1; n2 < half; ++n2) {
          int const e[2] = {m1, m2}, p[2] = {n1, n2};
          worst = std::max(worst, std::abs(read_amplitude(oracle.state, oracle.fock, e, p) -
                                           multi_pair_amplitude(omega, c_v, e, p).amplitude));
        }
  std::cout << "vacuum probability   " << std::norm(c_v.c_v) << "\n"
            << "oracle norm drift    " << oracle.norm_drift << "\n"
            << "max |difference| N<=2 " << worst << "\n";
  if (worst > 1e-8) {
    std::cout << "FAIL (tolerance 1e-8)\n";
    return kExitNumerical;
  }
  std::cout << "PASS (tolerance 1e-8)\n";
  return 0;
}

int cmd_dump_basis(std::string const &config_file, std::string const &preset_name)
{
  RunConfig const config = validate(load_run_config(config_file, preset_name));
  write_basis_csv(std::cout, build_basis(config.numerics, config.field));
  return 0;
}

int cmd_dump_field(std::string const &config_file, std::string const &preset_name, int samples_per_cycle, double z)
{
  RunConfig const config = validate(load_run_config(config_file, preset_name));
  auto const &f = config.field;
  long const total = static_cast<long>(config.window.total_cycles()) * samples_per_cycle;
  double const dt = f.period() / samples_per_cycle;
  std::cout.precision(12);
  std::cout << "t,t_cycles,envelope,A_x,A_y,A_z,E_x,E_y,E_z\n";
  for (long i = 0; i <= total; ++i) {
    double const t = static_cast<double>(i) * dt;
    Vector3 const a = potential_at(t, f, config.window).at(z, f.k());
    Vector3 const e = electric_field_at(z, t, f, config.window);
    std::cout << t << ',' << t / f.period() << ',' << envelope(t / f.period(), config.window) << ',' << a.x()
              << ',' << a.y() << ',' << a.z() << ',' << e.x() << ',' << e.y() << ',' << e.z() << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"pairfield: electron-positron multi-pair states in counterpropagating laser waves"};
  app.require_subcommand(1);

  std::string config_file, preset_name, spec_file, out, run_out;
  bool emit_config = false;
  int samples = 64;
  double z = 0.0;

  auto add_source = [&](CLI::App *cmd) {
    auto *c = cmd->add_option("--config", config_file, "run configuration (JSON)");
    auto *p = cmd->add_option("--preset", preset_name, "use a named preset instead of a file");
    c->excludes(p);
    p->excludes(c);
  };

  auto *run = app.add_subcommand("run", "single run; writes run.csv and run.json");
  add_source(run);
  run->add_option("--out", run_out, "output directory")->default_val("out");

  auto *sweep = app.add_subcommand("sweep", "parameter sweep from a sweep spec");
  sweep->add_option("--spec", spec_file, "sweep spec (JSON)")->required();
  sweep->add_option("--out", out, "output directory (overrides the spec)");

  auto *pre = app.add_subcommand("preset", "list presets or print one");
  pre->add_option("--name", preset_name, "fig2 | fig3 | fig4");
  pre->add_flag("--emit-config", emit_config, "print the preset as a config file");

  auto *oracle = app.add_subcommand("oracle-check", "compare amplitudes against exact Fock propagation");
  add_source(oracle);

  auto *basis = app.add_subcommand("dump-basis", "mode table as CSV");
  add_source(basis);

  auto *field = app.add_subcommand("dump-field", "A(t) and E(t) samples at fixed z as CSV");
  add_source(field);
  field->add_option("--samples-per-cycle", samples)->default_val(64);
  field->add_option("--z", z, "position in units of 1/m0")->default_val(0.0);

  CLI11_PARSE(app, argc, argv);

  auto need_source = [&] {
    if (config_file.empty() && preset_name.empty())
      throw ValidationError("cli", {"--config or --preset required"});
  };

  try {
    if (*run) {
      need_source();
      return cmd_run(config_file, preset_name, run_out);
    }
    if (*sweep)
      return cmd_sweep(spec_file, out);
    if (*pre)
      return cmd_preset(preset_name, emit_config);
    if (*oracle) {
      need_source();
      return cmd_oracle_check(config_file, preset_name);
    }
    if (*basis) {
      need_source();
      return cmd_dump_basis(config_file, preset_name);
    }
    if (*field) {
      need_source();
      return cmd_dump_field(config_file, preset_name, samples, z);
    }
  } catch (ValidationError const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (NumericalError const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
