#include "pairfield/config_io.hpp"

#include <fstream>

namespace pairfield {

using nlohmann::json;

json to_json(RunConfig const &c)
{
  json j;
  j["field"] = {
      {"omega", c.field.omega},
      {"e_peak", c.field.e_peak},
      {"alpha_plus", c.field.alpha_plus},
      {"alpha_minus", c.field.alpha_minus},
      {"helicity_relation", std::string(to_string(c.field.helicity_relation))},
  };
  j["window"] = {
      {"ramp_cycles", c.window.ramp_cycles},
      {"plateau_cycles", c.window.plateau_cycles},
  };
  j["numerics"] = {
      {"n_cut", c.numerics.n_cut},
      {"steps_per_cycle", c.numerics.steps_per_cycle},
      {"k0", {c.numerics.k0.x(), c.numerics.k0.y(), c.numerics.k0.z()}},
      {"prune_threshold", c.numerics.prune_threshold},
      {"n_sector_max", c.numerics.n_sector_max},
      {"unitarity_tol", c.numerics.unitarity_tol},
      {"cond_cap", c.numerics.cond_cap},
      {"enumeration_budget", c.numerics.enumeration_budget},
  };
  return j;
}

namespace {

json const &section(json const &j, char const *name)
{
  if (!j.is_object() || !j.contains(name) || !j.at(name).is_object())
    throw ValidationError("config", {std::string(name) + ": missing object"});
  return j.at(name);
}

template <typename T>
T required(json const &sec, char const *sec_name, char const *key)
{
  if (!sec.contains(key))
    throw ValidationError("config", {std::string(sec_name) + "." + key + ": missing"});
  try {
    return sec.at(key).get<T>();
  } catch (json::exception const &e) {
    throw ValidationError("config", {std::string(sec_name) + "." + key + ": " + e.what()});
  }
}

template <typename T>
T optional(json const &sec, char const *sec_name, char const *key, T fallback)
{
  return sec.contains(key) ? required<T>(sec, sec_name, key) : fallback;
}

} // namespace

RunConfig config_from_json(json const &j)
{
  RunConfig c;
  auto const &f = section(j, "field");
  c.field.omega = required<double>(f, "field", "omega");
  if (f.contains("e_peak"))
    c.field.e_peak = required<double>(f, "field", "e_peak");
  else if (f.contains("e_volts_per_meter"))
    c.field.e_peak = required<double>(f, "field", "e_volts_per_meter") / kCriticalFieldVPerM;
  else
    throw ValidationError("config", {"field.e_peak: missing (or give field.e_volts_per_meter)"});
  c.field.alpha_plus = required<double>(f, "field", "alpha_plus");
  c.field.helicity_relation =
      helicity_relation_from_string(required<std::string>(f, "field", "helicity_relation"));
  c.field.alpha_minus = optional<double>(f, "field", "alpha_minus",
                                         partner_angle(c.field.alpha_plus, c.field.helicity_relation));

  auto const &w = section(j, "window");
  c.window.ramp_cycles = required<int>(w, "window", "ramp_cycles");
  c.window.plateau_cycles = required<int>(w, "window", "plateau_cycles");

  auto const &n = section(j, "numerics");
  auto &num = c.numerics;
  num.n_cut = required<int>(n, "numerics", "n_cut");
  num.steps_per_cycle = optional<int>(n, "numerics", "steps_per_cycle", num.steps_per_cycle);
  if (n.contains("k0")) {
    auto const k0 = required<std::vector<double>>(n, "numerics", "k0");
    if (k0.size() != 3)
      throw ValidationError("config", {"numerics.k0: expected 3 components"});
    num.k0 = Vector3(k0[0], k0[1], k0[2]);
  }
  num.prune_threshold = optional<double>(n, "numerics", "prune_threshold", num.prune_threshold);
  num.n_sector_max = optional<int>(n, "numerics", "n_sector_max", num.n_sector_max);
  num.unitarity_tol = optional<double>(n, "numerics", "unitarity_tol", num.unitarity_tol);
  num.cond_cap = optional<double>(n, "numerics", "cond_cap", num.cond_cap);
  num.enumeration_budget =
      optional<double>(n, "numerics", "enumeration_budget", num.enumeration_budget);

  return validate(c);
}

RunConfig load_config(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
    throw ValidationError("config", {"cannot open " + path.string()});
  json j;
  try {
    in >> j;
  } catch (json::exception const &e) {
    throw ValidationError("config", {path.string() + ": " + e.what()});
  }
  return config_from_json(j);
}

void save_config(std::filesystem::path const &path, RunConfig const &config)
{
  std::ofstream out(path);
  if (!out)
    throw Error("config", "cannot write " + path.string());
  out << to_json(config).dump(2) << '\n';
}

} // namespace pairfield
