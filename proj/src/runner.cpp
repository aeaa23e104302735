#include "pairfield/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "pairfield/config_io.hpp"

namespace pairfield {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v)
{
  if (std::isnan(v))
    return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ResultRow empty_row(RunConfig const &config, double sweep_value)
{
  int const n_max = config.numerics.n_sector_max;
  ResultRow row;
  row.sweep_value = sweep_value;
  row.plateau_cycles = config.window.plateau_cycles;
  row.total_cycles = config.window.total_cycles();
  row.total_time = row.total_cycles * config.field.period();
  row.vacuum_probability = kNaN;
  row.c.assign(static_cast<std::size_t>(n_max + 1), kNaN);
  for (auto *v : {&row.spin_plus, &row.spin_minus, &row.helicity_plus, &row.helicity_minus})
    v->assign(static_cast<std::size_t>(n_max), kNaN);
  row.top_pair_probability = kNaN;
  row.unitarity_defect = kNaN;
  row.column_defect = kNaN;
  row.cond_gmm = kNaN;
  row.discarded_mass = kNaN;
  return row;
}

double json_number(json const &j)
{
  return j.is_null() ? kNaN : j.get<double>();
}

json number_or_null(double v)
{
  return std::isnan(v) ? json(nullptr) : json(v);
}

json vector_json(std::vector<double> const &v)
{
  json a = json::array();
  for (double x : v)
    a.push_back(number_or_null(x));
  return a;
}

std::vector<double> vector_from_json(json const &a)
{
  std::vector<double> v;
  for (auto const &x : a)
    v.push_back(json_number(x));
  return v;
}

SweepAxis axis_from_string(std::string const &s)
{
  if (s == "plateau_cycles")
    return SweepAxis::plateau_cycles;
  if (s == "alpha_plus")
    return SweepAxis::alpha_plus;
  if (s == "k0_z")
    return SweepAxis::k0_z;
  throw ValidationError("cli", {"axis: expected plateau_cycles, alpha_plus or k0_z, got \"" + s + "\""});
}

bool is_whole(double v) { return std::isfinite(v) && v >= 0 && std::floor(v) == v; }

} // namespace

RunResult analyze(RunConfig const &config, ModeBasis const &basis, Propagator const &u)
{
  RunResult result;
  result.config = config;
  GBlocks const g = extract_g_blocks(u, basis);
  PairAmplitudeMatrix const omega = pair_amplitudes(g, config.numerics.cond_cap);
  VacuumAmplitude const c_v = vacuum_amplitude(g);
  if (!(std::norm(c_v.c_v) <= 1.0 + 1e-10))
    throw NumericalError("multipair", "vacuum probability exceeds 1");
  result.report = sector_observables(omega, c_v, basis, config.numerics);

  ResultRow &row = result.row;
  row = empty_row(config, config.window.plateau_cycles);
  row.vacuum_probability = result.report.vacuum_probability;
  for (auto const &s : result.report.sectors) {
    row.c[static_cast<std::size_t>(s.pairs)] = s.probability;
    row.pruning_flag = row.pruning_flag || s.pruning_flag;
    if (s.pairs == 0)
      continue;
    auto const i = static_cast<std::size_t>(s.pairs - 1);
    row.spin_plus[i] = s.spin_plus.value_or(kNaN);
    row.spin_minus[i] = s.spin_minus.value_or(kNaN);
    row.helicity_plus[i] = s.helicity_plus.value_or(kNaN);
    row.helicity_minus[i] = s.helicity_minus.value_or(kNaN);
  }
  if (!result.report.retained_pairs.empty()) {
    auto const &top = result.report.retained_pairs.front();
    row.top_pair_probability = top.probability;
    row.top_pair_electron = describe(basis[basis.plus_indices()[static_cast<std::size_t>(top.electron)]].label);
    row.top_pair_positron = describe(basis[basis.minus_indices()[static_cast<std::size_t>(top.positron)]].label);
  } else {
    row.top_pair_probability = 0;
  }
  row.unitarity_defect = u.unitarity_defect;
  row.column_defect = column_unitarity_defect(g);
  row.cond_gmm = omega.cond_mm;
  row.discarded_mass = result.report.discarded_mass;
  return result;
}

RunResult run_once(RunConfig const &config)
{
  validate(config);
  ModeBasis const basis = build_basis(config.numerics, config.field);
  Propagator const u = propagate(config, basis);
  return analyze(config, basis, u);
}

SweepSpec sweep_spec_from_json(json const &j)
{
  SweepSpec spec;
  if (j.contains("preset")) {
    spec.base = preset(j.at("preset").get<std::string>()).config;
    if (j.contains("base"))
      throw ValidationError("cli", {"give either \"preset\" or \"base\", not both"});
  } else if (j.contains("base")) {
    spec.base = config_from_json(j.at("base"));
  } else {
    throw ValidationError("cli", {"sweep spec needs \"base\" or \"preset\""});
  }
  if (j.contains("n_cut"))
    spec.base.numerics.n_cut = j.at("n_cut").get<int>();
  spec.axis = axis_from_string(j.value("axis", std::string("plateau_cycles")));
  if (j.contains("values")) {
    spec.values = j.at("values").get<std::vector<double>>();
  } else if (j.contains("range")) {
    auto const &r = j.at("range");
    double const from = r.at("from").get<double>();
    double const to = r.at("to").get<double>();
    double const step = r.value("step", 1.0);
    if (!(step > 0))
      throw ValidationError("cli", {"range.step: must be > 0"});
    for (long i = 0;; ++i) {
      double const v = from + static_cast<double>(i) * step;
      if (v > to + 1e-9 * std::abs(step))
        break;
      spec.values.push_back(v);
    }
  }
  if (spec.values.empty())
    throw ValidationError("cli", {"sweep spec: values must be non-empty"});
  spec.output = j.value("output", std::string("out"));
  if (j.contains("emit")) {
    auto const &e = j.at("emit");
    spec.emit_sectors = e.value("sectors", true);
    spec.emit_pairs = e.value("pairs", true);
    spec.emit_gdump = e.value("gdump", false);
  }
  spec.compose_plateau = j.value("compose_plateau", true);
  spec.threads = j.value("threads", 0);
  if (spec.axis == SweepAxis::plateau_cycles) {
    for (double v : spec.values)
      if (!is_whole(v))
        throw ValidationError("cli", {"plateau_cycles sweep values must be non-negative integers"});
  }
  validate(spec.base);
  return spec;
}

SweepSpec load_sweep_spec(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cli", {"cannot open " + path.string()});
  json j;
  try {
    in >> j;
  } catch (json::exception const &e) {
    throw ValidationError("cli", {path.string() + ": " + e.what()});
  }
  return sweep_spec_from_json(j);
}

RunConfig sweep_point_config(SweepSpec const &spec, double value)
{
  RunConfig c = spec.base;
  switch (spec.axis) {
  case SweepAxis::plateau_cycles:
    c.window.plateau_cycles = static_cast<int>(value);
    break;
  case SweepAxis::alpha_plus:
    c.field.alpha_plus = value;
    c.field.alpha_minus = partner_angle(value, c.field.helicity_relation);
    break;
  case SweepAxis::k0_z:
    c.numerics.k0.z() = value;
    break;
  }
  return c;
}

SweepResult run_sweep(SweepSpec const &spec)
{
  namespace fs = std::filesystem;
  fs::create_directories(spec.output / "points");
  std::size_t const count = spec.values.size();
  std::vector<ResultRow> rows(count);
  std::vector<json> details(count);
  std::vector<char> done(count, 0);
  std::atomic<int> reused{0};

  std::vector<RunConfig> configs;
  std::vector<fs::path> cache;
  for (double v : spec.values) {
    configs.push_back(sweep_point_config(spec, v));
    cache.push_back(spec.output / "points" / (config_hash_hex(configs.back()) + ".json"));
  }

  for (std::size_t i = 0; i < count; ++i) {
    std::ifstream in(cache[i]);
    if (!in)
      continue;
    try {
      json j;
      in >> j;
      rows[i] = row_from_json(j.at("row"));
      rows[i].sweep_value = spec.values[i];
      details[i] = std::move(j);
      done[i] = 1;
      ++reused;
    } catch (json::exception const &) {
      // Unreadable cache entry: recompute.
    }
  }

  auto record = [&](std::size_t i, RunResult const &r, ModeBasis const &basis) {
    rows[i] = r.row;
    rows[i].sweep_value = spec.values[i];
    json detail = result_to_json(r, basis);
    detail["row"] = row_to_json(rows[i]);
    if (!spec.emit_pairs)
      detail.erase("pairs");
    if (!spec.emit_sectors)
      detail.erase("states");
    std::ofstream out(cache[i]);
    out << detail.dump() << '\n';
    details[i] = std::move(detail);
  };
  auto record_failure = [&](std::size_t i, std::string const &what) {
    rows[i] = empty_row(configs[i], spec.values[i]);
    rows[i].error = what;
    details[i] = json{{"row", row_to_json(rows[i])}, {"config", to_json(configs[i])}};
  };

  auto run_point = [&](std::size_t i) {
    try {
      validate(configs[i]);
      ModeBasis const basis = build_basis(configs[i].numerics, configs[i].field);
      Propagator const u = propagate(configs[i], basis);
      record(i, analyze(configs[i], basis, u), basis);
      if (spec.emit_gdump)
        dump_propagator(spec.output / "points" / config_hash_hex(configs[i]), u, extract_g_blocks(u, basis));
    } catch (std::exception const &e) {
      record_failure(i, e.what());
    }
  };

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < count; ++i)
    if (!done[i])
      todo.push_back(i);
  auto for_each_pending = [&](auto const &body) {
    unsigned const hw = std::max(1U, std::thread::hardware_concurrency());
    unsigned const workers =
        std::min<unsigned>(spec.threads > 0 ? static_cast<unsigned>(spec.threads) : hw,
                           static_cast<unsigned>(std::max<std::size_t>(todo.size(), 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < todo.size(); k = next++)
        body(todo[k]);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w)
      pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
      t.join();
  };

  bool const compose = spec.axis == SweepAxis::plateau_cycles && spec.compose_plateau;
  if (compose && !todo.empty()) {
    // The three plateau pieces are shared read-only by all points.
    std::optional<ModeBasis> basis;
    std::optional<PlateauPieces> pieces;
    try {
      basis.emplace(build_basis(spec.base.numerics, spec.base.field));
      pieces.emplace(plateau_pieces(spec.base, *basis));
    } catch (std::exception const &e) {
      for (std::size_t i : todo)
        record_failure(i, e.what());
      todo.clear();
    }
    for_each_pending([&](std::size_t i) {
      try {
        Propagator const u =
            cycle_compose(pieces->on, pieces->cycle, pieces->off, static_cast<std::int64_t>(spec.values[i]));
        record(i, analyze(configs[i], *basis, u), *basis);
        if (spec.emit_gdump)
          dump_propagator(spec.output / "points" / config_hash_hex(configs[i]), u, extract_g_blocks(u, *basis));
      } catch (std::exception const &e) {
        record_failure(i, e.what());
      }
    });
  } else {
    for_each_pending(run_point);
  }

  SweepResult result;
  result.rows = rows;
  result.reused_points = reused.load();
  result.csv_path = spec.output / "results.csv";
  result.json_path = spec.output / "results.json";
  {
    std::ofstream csv(result.csv_path);
    write_csv_header(csv, spec.base.numerics.n_sector_max);
    for (auto const &r : rows)
      write_csv_row(csv, r);
  }
  {
    json all = json::array();
    for (auto &d : details)
      all.push_back(d);
    std::ofstream out(result.json_path);
    out << all.dump(1) << '\n';
  }
  return result;
}

std::vector<std::string> csv_header(int n_sector_max)
{
  std::vector<std::string> h = {"sweep_value", "plateau_cycles", "total_cycles", "total_time", "vacuum_probability"};
  for (int n = 0; n <= n_sector_max; ++n)
    h.push_back("c_" + std::to_string(n));
  for (char const *name : {"s_plus_", "s_minus_", "h_plus_", "h_minus_"})
    for (int n = 1; n <= n_sector_max; ++n)
      h.push_back(name + std::to_string(n));
  for (char const *name : {"top_pair_probability", "top_pair_electron", "top_pair_positron", "unitarity_defect",
                           "column_defect", "cond_gmm", "discarded_mass", "pruning_flag", "error"})
    h.emplace_back(name);
  return h;
}

void write_csv_header(std::ostream &out, int n_sector_max)
{
  auto const h = csv_header(n_sector_max);
  for (std::size_t i = 0; i < h.size(); ++i)
    out << (i ? "," : "") << h[i];
  out << '\n';
}

void write_csv_row(std::ostream &out, ResultRow const &row)
{
  std::vector<std::string> f = {format_number(row.sweep_value), std::to_string(row.plateau_cycles),
                                std::to_string(row.total_cycles), format_number(row.total_time),
                                format_number(row.vacuum_probability)};
  for (double v : row.c)
    f.push_back(format_number(v));
  for (auto const *vec : {&row.spin_plus, &row.spin_minus, &row.helicity_plus, &row.helicity_minus})
    for (double v : *vec)
      f.push_back(format_number(v));
  std::string error = row.error;
  for (char &ch : error)
    if (ch == ',' || ch == '\n' || ch == '"')
      ch = ';';
  for (auto s : {format_number(row.top_pair_probability), row.top_pair_electron, row.top_pair_positron,
                 format_number(row.unitarity_defect), format_number(row.column_defect),
                 format_number(row.cond_gmm), format_number(row.discarded_mass),
                 std::string(row.pruning_flag ? "1" : "0"), error})
    f.push_back(std::move(s));
  for (std::size_t i = 0; i < f.size(); ++i)
    out << (i ? "," : "") << f[i];
  out << '\n';
}

json row_to_json(ResultRow const &row)
{
  return json{
      {"sweep_value", row.sweep_value},
      {"plateau_cycles", row.plateau_cycles},
      {"total_cycles", row.total_cycles},
      {"total_time", row.total_time},
      {"vacuum_probability", number_or_null(row.vacuum_probability)},
      {"c", vector_json(row.c)},
      {"spin_plus", vector_json(row.spin_plus)},
      {"spin_minus", vector_json(row.spin_minus)},
      {"helicity_plus", vector_json(row.helicity_plus)},
      {"helicity_minus", vector_json(row.helicity_minus)},
      {"top_pair_probability", number_or_null(row.top_pair_probability)},
      {"top_pair_electron", row.top_pair_electron},
      {"top_pair_positron", row.top_pair_positron},
      {"unitarity_defect", number_or_null(row.unitarity_defect)},
      {"column_defect", number_or_null(row.column_defect)},
      {"cond_gmm", number_or_null(row.cond_gmm)},
      {"discarded_mass", number_or_null(row.discarded_mass)},
      {"pruning_flag", row.pruning_flag},
      {"error", row.error},
  };
}

ResultRow row_from_json(json const &j)
{
  ResultRow row;
  row.sweep_value = j.at("sweep_value").get<double>();
  row.plateau_cycles = j.at("plateau_cycles").get<int>();
  row.total_cycles = j.at("total_cycles").get<int>();
  row.total_time = j.at("total_time").get<double>();
  row.vacuum_probability = json_number(j.at("vacuum_probability"));
  row.c = vector_from_json(j.at("c"));
  row.spin_plus = vector_from_json(j.at("spin_plus"));
  row.spin_minus = vector_from_json(j.at("spin_minus"));
  row.helicity_plus = vector_from_json(j.at("helicity_plus"));
  row.helicity_minus = vector_from_json(j.at("helicity_minus"));
  row.top_pair_probability = json_number(j.at("top_pair_probability"));
  row.top_pair_electron = j.at("top_pair_electron").get<std::string>();
  row.top_pair_positron = j.at("top_pair_positron").get<std::string>();
  row.unitarity_defect = json_number(j.at("unitarity_defect"));
  row.column_defect = json_number(j.at("column_defect"));
  row.cond_gmm = json_number(j.at("cond_gmm"));
  row.discarded_mass = json_number(j.at("discarded_mass"));
  row.pruning_flag = j.at("pruning_flag").get<bool>();
  row.error = j.at("error").get<std::string>();
  return row;
}

json result_to_json(RunResult const &result, ModeBasis const &basis)
{
  auto const &plus = basis.plus_indices();
  auto const &minus = basis.minus_indices();
  auto electron = [&](int e) { return describe(basis[plus[static_cast<std::size_t>(e)]].label); };
  auto positron = [&](int p) { return describe(basis[minus[static_cast<std::size_t>(p)]].label); };

  json pairs = json::array();
  for (auto const &p : result.report.retained_pairs)
    pairs.push_back({{"electron", electron(p.electron)}, {"positron", positron(p.positron)},
                     {"electron_index", p.electron}, {"positron_index", p.positron},
                     {"probability", p.probability}});
  json sectors = json::array();
  for (auto const &s : result.report.sectors) {
    sectors.push_back({{"N", s.pairs}, {"c_N", s.probability}, {"c_N_unpruned", s.exact_probability},
                       {"pruned_mass", s.pruned_mass}, {"pruning_flag", s.pruning_flag},
                       {"s_plus", number_or_null(s.spin_plus.value_or(kNaN))},
                       {"s_minus", number_or_null(s.spin_minus.value_or(kNaN))},
                       {"h_plus", number_or_null(s.helicity_plus.value_or(kNaN))},
                       {"h_minus", number_or_null(s.helicity_minus.value_or(kNaN))}});
  }
  json states = json::array();
  for (auto const &per_n : result.report.top_states) {
    for (auto const &s : per_n) {
      json e = json::array(), p = json::array();
      for (int x : s.electrons)
        e.push_back(electron(x));
      for (int x : s.positrons)
        p.push_back(positron(x));
      states.push_back({{"N", s.pairs()}, {"electrons", e}, {"positrons", p}, {"probability", std::norm(s.amplitude)}});
    }
  }
  return json{{"config", to_json(result.config)},
              {"row", row_to_json(result.row)},
              {"sectors", sectors},
              {"pairs", pairs},
              {"states", states},
              {"tail_mass", result.report.tail_mass}};
}

std::map<std::string, Preset> const &figure_configs()
{
  static std::map<std::string, Preset> const presets = [] {
    std::vector<std::string> const assumed = {"window.ramp_cycles", "window.plateau_cycles", "numerics.n_cut",
                                              "numerics.steps_per_cycle", "numerics.prune_threshold",
                                              "numerics.n_sector_max"};
    RunConfig base;
    base.window.ramp_cycles = 5;
    base.window.plateau_cycles = 100;
    base.numerics.n_cut = 4;
    base.numerics.steps_per_cycle = 1024;
    base.numerics.prune_threshold = 1e-4;
    base.numerics.n_sector_max = 6;

    std::map<std::string, Preset> m;
    RunConfig fig2 = base;
    fig2.field = field_from_si(4.9e17, 0.746, 0.2 * kPi / 4, HelicityRelation::same);
    m["fig2"] = {fig2, assumed, "single- and multi-pair probabilities, same helicity"};

    auto fig3_assumed = assumed;
    fig3_assumed.emplace_back("numerics (assumed identical to fig2)");
    m["fig3"] = {fig2, fig3_assumed, "averaged helicity per sector, parameters of fig2"};

    RunConfig fig4 = base;
    fig4.field = field_from_si(3.1e17, 0.4715, 0.7 * kPi / 4, HelicityRelation::opposite);
    m["fig4"] = {fig4, assumed, "averaged spin per sector, opposite helicity"};
    return m;
  }();
  return presets;
}

Preset const &preset(std::string const &name)
{
  auto const &all = figure_configs();
  auto const it = all.find(name);
  if (it == all.end())
    throw ValidationError("cli", {"unknown preset \"" + name + "\" (fig2, fig3, fig4)"});
  return it->second;
}

json preset_to_json(std::string const &name, Preset const &p)
{
  json j = to_json(p.config);
  j["metadata"] = {{"preset", name}, {"description", p.description}, {"assumed", p.assumed}};
  return j;
}

} // namespace pairfield
