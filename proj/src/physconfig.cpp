#include "pairfield/physconfig.hpp"

#include <cmath>
#include <cstdio>

#include "pairfield/config_io.hpp"

namespace pairfield {

namespace {

std::string join_issues(std::vector<std::string> const &issues)
{
  std::string out;
  for (auto const &issue : issues) {
    if (!out.empty())
      out += "; ";
    out += issue;
  }
  return out;
}

constexpr double kAngleConsistencyTol = 1e-12;

} // namespace

ValidationError::ValidationError(std::string module, std::vector<std::string> issues)
    : Error(std::move(module), "validation failed: " + join_issues(issues)),
      issues_(std::move(issues))
{
}

std::string_view to_string(HelicityRelation r)
{
  return r == HelicityRelation::same ? "same" : "opposite";
}

HelicityRelation helicity_relation_from_string(std::string_view s)
{
  if (s == "same")
    return HelicityRelation::same;
  if (s == "opposite")
    return HelicityRelation::opposite;
  throw ValidationError("physconfig", {"field.helicity_relation: expected \"same\" or \"opposite\", got \"" +
                                           std::string(s) + "\""});
}

double xi(FieldParams const &field) noexcept { return field.e_peak / field.omega; }

double partner_angle(double alpha_plus, HelicityRelation relation) noexcept
{
  return relation == HelicityRelation::same ? kPi / 2 - alpha_plus : alpha_plus;
}

FieldParams field_from_si(double e_volts_per_meter, double omega_in_m0, double alpha_plus,
                          HelicityRelation relation)
{
  std::vector<std::string> issues;
  if (!(e_volts_per_meter > 0))
    issues.emplace_back("e_volts_per_meter: must be > 0");
  if (!(omega_in_m0 > 0))
    issues.emplace_back("omega: must be > 0");
  if (!(alpha_plus >= 0 && alpha_plus <= kPi / 2))
    issues.emplace_back("alpha_plus: alpha range [0, pi/2]");
  if (!issues.empty())
    throw ValidationError("physconfig", std::move(issues));

  FieldParams f;
  f.omega = omega_in_m0;
  f.e_peak = e_volts_per_meter / kCriticalFieldVPerM;
  f.alpha_plus = alpha_plus;
  f.alpha_minus = partner_angle(alpha_plus, relation);
  f.helicity_relation = relation;
  return f;
}

double field_to_si(FieldParams const &field) noexcept
{
  return field.e_peak * kCriticalFieldVPerM;
}

RunConfig const &validate(RunConfig const &config)
{
  std::vector<std::string> issues;
  auto const &f = config.field;
  auto const &w = config.window;
  auto const &n = config.numerics;

  if (!(f.omega > 0) || !std::isfinite(f.omega))
    issues.emplace_back("field.omega: omega > 0");
  // Zero amplitude is admitted so that free evolution can be run through the
  // same pipeline.
  if (!(f.e_peak >= 0) || !std::isfinite(f.e_peak))
    issues.emplace_back("field.e_peak: e_peak >= 0");
  bool angles_ok = true;
  if (!(f.alpha_plus >= 0 && f.alpha_plus <= kPi / 2)) {
    issues.emplace_back("field.alpha_plus: alpha range [0, pi/2]");
    angles_ok = false;
  }
  if (!(f.alpha_minus >= 0 && f.alpha_minus <= kPi / 2)) {
    issues.emplace_back("field.alpha_minus: alpha range [0, pi/2]");
    angles_ok = false;
  }
  if (angles_ok &&
      std::abs(partner_angle(f.alpha_plus, f.helicity_relation) - f.alpha_minus) > kAngleConsistencyTol)
    issues.emplace_back("field.helicity_relation: inconsistent with alpha_plus/alpha_minus");

  if (w.ramp_cycles < 1)
    issues.emplace_back("window.ramp_cycles: ramp_cycles >= 1");
  if (w.plateau_cycles < 0)
    issues.emplace_back("window.plateau_cycles: plateau_cycles >= 0");

  if (n.n_cut < 1)
    issues.emplace_back("numerics.n_cut: n_cut >= 1");
  if (n.steps_per_cycle < 16)
    issues.emplace_back("numerics.steps_per_cycle: steps_per_cycle >= 16");
  if (!n.k0.allFinite())
    issues.emplace_back("numerics.k0: finite components");
  if (!(n.prune_threshold >= 0 && n.prune_threshold < 1))
    issues.emplace_back("numerics.prune_threshold: 0 <= prune_threshold < 1");
  if (n.n_sector_max < 1 || n.n_sector_max > 8)
    issues.emplace_back("numerics.n_sector_max: 1 <= n_sector_max <= 8");
  if (!(n.unitarity_tol > 0))
    issues.emplace_back("numerics.unitarity_tol: > 0");
  if (!(n.cond_cap > 1))
    issues.emplace_back("numerics.cond_cap: > 1");
  if (!(n.enumeration_budget >= 1))
    issues.emplace_back("numerics.enumeration_budget: >= 1");

  if (!issues.empty())
    throw ValidationError("physconfig", std::move(issues));
  return config;
}

std::uint64_t config_hash(RunConfig const &config)
{
  // FNV-1a over the compact JSON dump; key order is fixed by nlohmann's map.
  auto const text = to_json(config).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash_hex(RunConfig const &config)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

} // namespace pairfield
