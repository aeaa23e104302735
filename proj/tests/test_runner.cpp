#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pairfield/config_io.hpp"
#include "pairfield/runner.hpp"

using namespace pairfield;
namespace fs = std::filesystem;

namespace {

RunConfig small_config()
{
  RunConfig c;
  c.field = field_from_si(4.9e17, 0.746, 0.2 * kPi / 4, HelicityRelation::same);
  c.field.e_peak = 0.8;
  c.window = {1, 1};
  c.numerics.n_cut = 1;
  c.numerics.steps_per_cycle = 64;
  c.numerics.prune_threshold = 0;
  c.numerics.n_sector_max = 3;
  return c;
}

std::string slurp(fs::path const &p)
{
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(std::string const &name)
{
  auto const dir = fs::temp_directory_path() / ("pairfield_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string csv_line(ResultRow const &row)
{
  std::ostringstream out;
  write_csv_row(out, row);
  return out.str();
}

} // namespace

TEST_CASE("zero field run")
{
  auto c = small_config();
  c.field.e_peak = 0;
  auto const r = run_once(c);
  CHECK(r.row.vacuum_probability == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.row.c[0] == doctest::Approx(1.0).epsilon(1e-13));
  for (std::size_t n = 1; n < r.row.c.size(); ++n) {
    CHECK(r.row.c[n] == 0.0);
    CHECK(std::isnan(r.row.spin_plus[n - 1]));
  }
  CHECK(r.row.top_pair_electron.empty());
  CHECK(r.row.error.empty());
}

TEST_CASE("run_once is deterministic")
{
  auto const c = small_config();
  auto const a = run_once(c);
  auto const b = run_once(c);
  CHECK(csv_line(a.row) == csv_line(b.row));
  CHECK(a.row.c[1] > 1e-4);
  CHECK(a.row.total_cycles == 3);
  CHECK(a.row.plateau_cycles == 1);
  CHECK(a.row.total_time == doctest::Approx(3 * c.field.period()));
  CHECK(!a.row.top_pair_electron.empty());
}

TEST_CASE("csv schema depends only on the sector count")
{
  for (int n : {1, 4, 6}) {
    auto const h = csv_header(n);
    CHECK(h.size() == static_cast<std::size_t>(5 + (n + 1) + 4 * n + 9));
    CHECK(h.front() == "sweep_value");
    CHECK(h.back() == "error");
  }
  auto c = small_config();
  auto const row = run_once(c).row;
  std::ostringstream out;
  write_csv_header(out, c.numerics.n_sector_max);
  write_csv_row(out, row);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  auto commas = [](std::string const &s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(commas(header) == commas(line));

  auto const back = row_from_json(row_to_json(row));
  CHECK(csv_line(back) == csv_line(row));
}

TEST_CASE("plateau sweep {0} equals run_once")
{
  auto const dir = scratch_dir("single");
  SweepSpec spec;
  spec.base = small_config();
  spec.values = {0};
  spec.output = dir;
  auto const res = run_sweep(spec);
  REQUIRE(res.rows.size() == 1);
  auto c = spec.base;
  c.window.plateau_cycles = 0;
  auto const direct = run_once(c).row;
  auto const &row = res.rows[0];
  CHECK(row.error.empty());
  CHECK(row.total_cycles == direct.total_cycles);
  CHECK(row.vacuum_probability == doctest::Approx(direct.vacuum_probability).epsilon(1e-12));
  for (std::size_t n = 0; n < row.c.size(); ++n)
    CHECK(std::abs(row.c[n] - direct.c[n]) < 1e-12);
  CHECK(row.top_pair_electron == direct.top_pair_electron);
  CHECK(fs::exists(res.csv_path));
  CHECK(fs::exists(res.json_path));
  fs::remove_all(dir);
}

TEST_CASE("sweep rerun reuses completed points byte-identically")
{
  auto const dir = scratch_dir("resume");
  SweepSpec spec;
  spec.base = small_config();
  spec.values = {0, 2, 1};
  spec.output = dir;
  auto const first = run_sweep(spec);
  CHECK(first.reused_points == 0);
  CHECK(first.rows[1].plateau_cycles == 2);
  auto const csv = slurp(first.csv_path);
  auto const js = slurp(first.json_path);

  auto const second = run_sweep(spec);
  CHECK(second.reused_points == 3);
  CHECK(slurp(second.csv_path) == csv);
  CHECK(slurp(second.json_path) == js);

  // Composition and direct integration agree per point.
  spec.compose_plateau = false;
  spec.output = dir / "direct";
  auto const direct = run_sweep(spec);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(direct.rows[i].c[1] - first.rows[i].c[1]) < 1e-10);
  fs::remove_all(dir);
}

TEST_CASE("failed sweep points are recorded and the sweep continues")
{
  auto const dir = scratch_dir("failure");
  SweepSpec spec;
  spec.base = small_config();
  spec.axis = SweepAxis::alpha_plus;
  spec.values = {0.2, 3.0};
  spec.output = dir;
  auto const res = run_sweep(spec);
  CHECK(res.rows[0].error.empty());
  CHECK(res.rows[1].error.find("alpha range") != std::string::npos);
  CHECK(slurp(res.csv_path).find("alpha range") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("opposite helicity: spin vanishes only for linear polarisation")
{
  auto const dir = scratch_dir("alpha");
  SweepSpec spec;
  spec.base = small_config();
  spec.base.field.helicity_relation = HelicityRelation::opposite;
  spec.base.field.alpha_minus = spec.base.field.alpha_plus;
  spec.axis = SweepAxis::alpha_plus;
  spec.values = {0, kPi / 8, kPi / 4};
  spec.output = dir;
  auto const res = run_sweep(spec);
  auto max_spin = [](ResultRow const &r) {
    double m = 0;
    for (auto const *v : {&r.spin_plus, &r.spin_minus})
      for (double x : *v)
        if (!std::isnan(x))
          m = std::max(m, std::abs(x));
    return m;
  };
  CHECK(max_spin(res.rows[0]) > 1e-4);
  CHECK(max_spin(res.rows[1]) > 1e-4);
  CHECK(max_spin(res.rows[2]) < 1e-8);
  fs::remove_all(dir);
}

TEST_CASE("sweep spec parsing")
{
  nlohmann::json j = {{"preset", "fig2"}, {"n_cut", 2}, {"range", {{"from", 0}, {"to", 10}, {"step", 5}}}};
  auto const s = sweep_spec_from_json(j);
  CHECK(s.values == std::vector<double>{0, 5, 10});
  CHECK(s.base.numerics.n_cut == 2);
  CHECK(s.axis == SweepAxis::plateau_cycles);

  nlohmann::json k = {{"base", to_json(small_config())}, {"axis", "k0_z"}, {"values", {0.0, 0.1}}};
  auto const t = sweep_spec_from_json(k);
  CHECK(sweep_point_config(t, 0.1).numerics.k0.z() == 0.1);

  CHECK_THROWS_AS(sweep_spec_from_json({{"preset", "fig2"}, {"values", {1.5}}}), ValidationError);
  CHECK_THROWS_AS(sweep_spec_from_json({{"preset", "fig2"}, {"values", nlohmann::json::array()}}), ValidationError);
  CHECK_THROWS_AS(sweep_spec_from_json({{"values", {1}}}), ValidationError);
  CHECK_THROWS_AS(sweep_spec_from_json({{"preset", "fig2"}, {"axis", "bogus"}, {"values", {1}}}), ValidationError);
}

TEST_CASE("figure presets")
{
  auto const &f2 = preset("fig2").config;
  CHECK(f2.field.omega == 0.746);
  CHECK(field_to_si(f2.field) == doctest::Approx(4.9e17));
  CHECK(f2.field.alpha_plus == doctest::Approx(0.2 * kPi / 4));
  CHECK(f2.field.helicity_relation == HelicityRelation::same);
  CHECK(f2.window.ramp_cycles == 5);

  auto const &f4 = preset("fig4").config;
  CHECK(f4.field.omega == 0.4715);
  CHECK(f4.field.alpha_minus == doctest::Approx(0.7 * kPi / 4));
  CHECK(f4.field.alpha_plus == doctest::Approx(0.7 * kPi / 4));
  CHECK(f4.field.helicity_relation == HelicityRelation::opposite);

  CHECK(to_json(preset("fig3").config) == to_json(f2));
  for (auto const &[name, p] : figure_configs()) {
    CHECK_NOTHROW(validate(p.config));
    auto const j = preset_to_json(name, p);
    CHECK(j.at("metadata").at("assumed").size() == p.assumed.size());
    CHECK(std::find(p.assumed.begin(), p.assumed.end(), "window.ramp_cycles") != p.assumed.end());
    CHECK(to_json(config_from_json(j)) == to_json(p.config));
  }
  CHECK_THROWS_AS(preset("fig9"), ValidationError);
}
