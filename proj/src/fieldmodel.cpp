#include "pairfield/fieldmodel.hpp"

#include <cmath>

namespace pairfield {

namespace {

constexpr Complex kI{0.0, 1.0};

Vector3c left_vector()
{
  return Vector3c(Complex(1.0, 0.0), kI, Complex(0.0, 0.0)) / std::sqrt(2.0);
}

Vector3c right_vector()
{
  return Vector3c(Complex(1.0, 0.0), -kI, Complex(0.0, 0.0)) / std::sqrt(2.0);
}

struct BeamAmplitudes
{
  // Unwindowed complex amplitude of each beam's e*A, without the carrier.
  Vector3c plus;
  Vector3c minus;
};

BeamAmplitudes beam_amplitudes(FieldParams const &field, Beams beams)
{
  // A = -int E dt: E = Re(E0 J e^{-i w t}) gives A = Re(E0 J/(i w) e^{-i w t}).
  Complex const scale = field.e_peak / (kI * field.omega);
  BeamAmplitudes a;
  a.plus = beams == Beams::minus_only ? Vector3c::Zero() : Vector3c(scale * jones(field.alpha_plus).vector());
  a.minus = beams == Beams::plus_only ? Vector3c::Zero() : Vector3c(scale * jones(field.alpha_minus).vector());
  return a;
}

} // namespace

Vector3c JonesAmplitude::vector() const { return c_left * left_vector() + c_right * right_vector(); }

JonesAmplitude jones(double alpha) noexcept { return {std::cos(alpha), std::sin(alpha)}; }

Vector3 FourierPotential::at(double z, double k) const
{
  Complex const phase = std::polar(1.0, k * z);
  Vector3c const half = c_plus_k * phase + c_minus_k * std::conj(phase);
  return 2.0 * half.real();
}

double envelope(double t_cycles, WindowParams const &window) noexcept
{
  double const ramp = window.ramp_cycles;
  double const off_start = ramp + window.plateau_cycles;
  if (t_cycles <= 0.0 || t_cycles >= off_start + ramp)
    return 0.0;
  if (t_cycles < ramp) {
    double const s = std::sin(kPi * t_cycles / (2.0 * ramp));
    return s * s;
  }
  if (t_cycles <= off_start)
    return 1.0;
  double const c = std::cos(kPi * (t_cycles - off_start) / (2.0 * ramp));
  return c * c;
}

double envelope_derivative(double t_cycles, WindowParams const &window) noexcept
{
  double const ramp = window.ramp_cycles;
  double const off_start = ramp + window.plateau_cycles;
  if (t_cycles <= 0.0 || t_cycles >= off_start + ramp)
    return 0.0;
  // d/dt sin^2(a t) = a sin(2 a t)
  double const a = kPi / (2.0 * ramp);
  if (t_cycles < ramp)
    return a * std::sin(2.0 * a * t_cycles);
  if (t_cycles <= off_start)
    return 0.0;
  return -a * std::sin(2.0 * a * (t_cycles - off_start));
}

FourierPotential potential_at(double t, FieldParams const &field, WindowParams const &window,
                              Beams beams)
{
  FourierPotential pot;
  double const f = envelope(t / field.period(), window);
  if (f == 0.0)
    return pot;
  auto const a = beam_amplitudes(field, beams);
  Complex const carrier = 0.5 * f * std::polar(1.0, -field.omega * t);
  pot.c_plus_k = carrier * a.plus;
  pot.c_minus_k = carrier * a.minus;
  return pot;
}

Vector3 electric_field_at(double z, double t, FieldParams const &field, WindowParams const &window,
                          Beams beams)
{
  double const period = field.period();
  double const f = envelope(t / period, window);
  double const df = envelope_derivative(t / period, window) / period;
  if (f == 0.0 && df == 0.0)
    return Vector3::Zero();
  auto const a = beam_amplitudes(field, beams);
  double const k = field.k();
  // d/dt [f a e^{i(+-kz - wt)}] = (f' - i w f) a e^{i(+-kz - wt)}
  Complex const rate = Complex(df, -field.omega * f);
  Complex const carrier = std::polar(1.0, -field.omega * t);
  Vector3c const d_dt =
      rate * carrier * (a.plus * std::polar(1.0, k * z) + a.minus * std::polar(1.0, -k * z));
  return -d_dt.real();
}

} // namespace pairfield
