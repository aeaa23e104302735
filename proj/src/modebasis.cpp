#include "pairfield/modebasis.hpp"

#include <cmath>
#include <ostream>

namespace pairfield {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Matrix2cd pauli(int axis)
{
  Eigen::Matrix2cd s;
  switch (axis) {
  case 0:
    s << 0, 1, 1, 0;
    break;
  case 1:
    s << 0, -kI, kI, 0;
    break;
  default:
    s << 1, 0, 0, -1;
    break;
  }
  return s;
}

Eigen::Matrix2cd sigma_dot(Vector3 const &p)
{
  return p.x() * pauli(0) + p.y() * pauli(1) + p.z() * pauli(2);
}

} // namespace

namespace dirac {

Matrix4c alpha(int axis)
{
  Matrix4c a = Matrix4c::Zero();
  a.topRightCorner<2, 2>() = pauli(axis);
  a.bottomLeftCorner<2, 2>() = pauli(axis);
  return a;
}

Matrix4c beta()
{
  Matrix4c b = Matrix4c::Identity();
  b.bottomRightCorner<2, 2>() *= -1.0;
  return b;
}

Matrix4c sigma(int axis)
{
  Matrix4c s = Matrix4c::Zero();
  s.topLeftCorner<2, 2>() = pauli(axis);
  s.bottomRightCorner<2, 2>() = pauli(axis);
  return s;
}

Matrix4c free_hamiltonian(Vector3 const &p)
{
  return p.x() * alpha(0) + p.y() * alpha(1) + p.z() * alpha(2) + beta();
}

} // namespace dirac

Spinor free_spinor(Vector3 const &p, Band band, Spin spin)
{
  double const e = std::sqrt(1.0 + p.squaredNorm());
  double const norm = std::sqrt((e + 1.0) / (2.0 * e));
  Eigen::Vector2cd chi = spin == Spin::up ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
  Eigen::Vector2cd const small = sigma_dot(p) * chi / (e + 1.0);
  Spinor s;
  if (band == Band::plus)
    s << chi, small;
  else
    s << -small, chi;
  return norm * s;
}

ModeBasis::ModeBasis(int n_cut, double k, Vector3 const &k0) : n_cut_(n_cut), k_(k), k0_(k0)
{
  if (n_cut < 0)
    throw ValidationError("modebasis", {"n_cut >= 0"});
  modes_.reserve(static_cast<std::size_t>(4 * momenta()));
  for (int n = -n_cut; n <= n_cut; ++n) {
    Vector3 const p = n * k * Vector3::UnitZ() + k0;
    double const e = std::sqrt(1.0 + p.squaredNorm());
    double const pnorm = p.norm();
    for (Band band : {Band::plus, Band::minus}) {
      for (Spin spin : {Spin::up, Spin::down}) {
        FreeMode m;
        m.label = {n, band, spin};
        m.momentum = p;
        m.energy = band == Band::plus ? e : -e;
        m.spinor = free_spinor(p, band, spin);
        m.spin_z = 0.5 * (m.spinor.adjoint() * dirac::sigma(2) * m.spinor)(0).real();
        if (pnorm > 0) {
          Matrix4c const h = (p.x() * dirac::sigma(0) + p.y() * dirac::sigma(1) + p.z() * dirac::sigma(2)) / pnorm;
          m.helicity = 0.5 * (m.spinor.adjoint() * h * m.spinor)(0).real();
        }
        (band == Band::plus ? plus_ : minus_).push_back(static_cast<Index>(modes_.size()));
        modes_.push_back(m);
      }
    }
  }
}

Index ModeBasis::index(ModeLabel const &label) const
{
  if (label.n < -n_cut_ || label.n > n_cut_)
    throw ValidationError("modebasis", {"momentum index " + std::to_string(label.n) + " outside basis"});
  return 4 * (label.n + n_cut_) + 2 * (label.band == Band::minus ? 1 : 0) + (label.spin == Spin::down ? 1 : 0);
}

Matrix4c ModeBasis::spinor_block(int n) const
{
  Matrix4c block;
  Index const first = 4 * (n + n_cut_);
  for (int c = 0; c < 4; ++c)
    block.col(c) = modes_[static_cast<std::size_t>(first + c)].spinor;
  return block;
}

Eigen::VectorXd ModeBasis::energies() const
{
  Eigen::VectorXd e(size());
  for (Index i = 0; i < size(); ++i)
    e(i) = (*this)[i].energy;
  return e;
}

ModeBasis build_basis(NumericsParams const &numerics, FieldParams const &field)
{
  return ModeBasis(numerics.n_cut, field.k(), numerics.k0);
}

Complex free_phase(FreeMode const &mode, double duration) noexcept
{
  return std::polar(1.0, -mode.energy * duration);
}

double particle_spin_z(FreeMode const &mode) noexcept
{
  return mode.label.band == Band::plus ? mode.spin_z : -mode.spin_z;
}

double particle_helicity(FreeMode const &mode) noexcept { return mode.helicity; }

void write_basis_csv(std::ostream &out, ModeBasis const &basis)
{
  out << "index,n,band,spin,p_x,p_y,p_z,energy,spin_z,helicity\n";
  auto const old = out.precision(17);
  for (Index i = 0; i < basis.size(); ++i) {
    auto const &m = basis[i];
    out << i << ',' << m.label.n << ',' << (m.label.band == Band::plus ? "plus" : "minus") << ','
        << (m.label.spin == Spin::up ? "up" : "down") << ',' << m.momentum.x() << ',' << m.momentum.y()
        << ',' << m.momentum.z() << ',' << m.energy << ',' << m.spin_z << ',' << m.helicity << '\n';
  }
  out.precision(old);
}

} // namespace pairfield
