#pragma once

#include "physconfig.hpp"
#include "types.hpp"

/// Two counterpropagating elliptically polarised plane waves along z with a
/// sin^2 turn-on, a flat plateau and a mirrored turn-off applied to the vector
/// potential. Temporal gauge; e*A in units of m0.
namespace pairfield {

/// Weights of the circular Jones vectors |l> = (e_x + i e_y)/sqrt2 and
/// |r> = (e_x - i e_y)/sqrt2 in one beam's polarisation.
struct JonesAmplitude
{
  Complex c_left;
  Complex c_right;

  Vector3c vector() const;
};

JonesAmplitude jones(double alpha) noexcept;

/// e*A(z, t) = C+ e^{ikz} + C- e^{-ikz} + c.c.
struct FourierPotential
{
  Vector3c c_plus_k = Vector3c::Zero();
  Vector3c c_minus_k = Vector3c::Zero();

  /// Real potential at position z for wave number k.
  Vector3 at(double z, double k) const;
};

enum class Beams
{
  both,
  plus_only,  ///< the wave travelling towards +z
  minus_only, ///< the wave travelling towards -z
};

/// Window value at time `t_cycles` measured in laser periods.
double envelope(double t_cycles, WindowParams const &window) noexcept;
/// d(envelope)/d(t_cycles).
double envelope_derivative(double t_cycles, WindowParams const &window) noexcept;

/// Fourier components of the windowed potential at time t (units hbar/m0).
FourierPotential potential_at(double t, FieldParams const &field, WindowParams const &window,
                              Beams beams = Beams::both);

/// -dA/dt at (z, t), differentiated analytically including the envelope slope.
/// Returned as e*E in units of m0^2, i.e. as a fraction of the critical field.
Vector3 electric_field_at(double z, double t, FieldParams const &field, WindowParams const &window,
                          Beams beams = Beams::both);

} // namespace pairfield
