#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "types.hpp"

/// Physical units and validated run configuration.
///
/// Internally everything is in natural units hbar = c = m0 = 1 with the
/// electron charge q = -e. Field strengths are stored as fractions of the
/// critical field E_S = m0^2 c^3 / (e hbar); the product e*A of the charge
/// and the vector potential is then measured in units of m0.
namespace pairfield {

/// Critical (Schwinger) field strength in V/m.
inline constexpr double kCriticalFieldVPerM = 1.3e18;

enum class HelicityRelation
{
  same,     ///< alpha_plus = pi/2 - alpha_minus
  opposite, ///< alpha_plus = alpha_minus
};

std::string_view to_string(HelicityRelation r);
HelicityRelation helicity_relation_from_string(std::string_view s);

struct FieldParams
{
  double omega = 1.0;  ///< angular frequency / m0
  double e_peak = 0.0; ///< peak field / E_S
  double alpha_plus = kPi / 4;
  double alpha_minus = kPi / 4;
  HelicityRelation helicity_relation = HelicityRelation::opposite;

  /// Wave number; the waves are light-like so k = omega.
  double k() const noexcept { return omega; }
  /// One laser period in units of hbar/m0.
  double period() const noexcept { return 2.0 * kPi / omega; }
};

struct WindowParams
{
  int ramp_cycles = 1;
  int plateau_cycles = 0;

  int total_cycles() const noexcept { return 2 * ramp_cycles + plateau_cycles; }
};

struct NumericsParams
{
  int n_cut = 1;
  int steps_per_cycle = 1024;
  Vector3 k0 = Vector3::Zero();
  double prune_threshold = 1e-6;
  int n_sector_max = 4;

  double unitarity_tol = 1e-10;
  double cond_cap = 1e12;
  /// Upper limit on the number of (electron subset, positron subset) pairs
  /// visited by the sector enumeration; the walk costs roughly 60 ns per pair.
  double enumeration_budget = 1e9;
};

struct RunConfig
{
  FieldParams field;
  WindowParams window;
  NumericsParams numerics;
};

/// Classical nonlinearity parameter e E / (m0 c omega).
double xi(FieldParams const &field) noexcept;

/// alpha_minus implied by alpha_plus and the helicity relation.
double partner_angle(double alpha_plus, HelicityRelation relation) noexcept;

FieldParams field_from_si(double e_volts_per_meter, double omega_in_m0, double alpha_plus,
                          HelicityRelation relation);

/// Peak field in V/m.
double field_to_si(FieldParams const &field) noexcept;

/// Returns `config` unchanged when every invariant holds, otherwise throws a
/// ValidationError listing each violated invariant with its field path.
RunConfig const &validate(RunConfig const &config);

/// Stable 64-bit content hash of the canonical JSON serialisation.
std::uint64_t config_hash(RunConfig const &config);
std::string config_hash_hex(RunConfig const &config);

} // namespace pairfield
