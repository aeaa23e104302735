#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pairfield/modebasis.hpp"

using namespace pairfield;

TEST_CASE("basis size, ordering and energies")
{
  ModeBasis const b(1, 0.746, Vector3::Zero());
  REQUIRE(b.size() == 12);
  CHECK(b.half_size() == 6);
  double const ep = std::sqrt(1.0 + 0.746 * 0.746);
  CHECK(ep == doctest::Approx(1.2476).epsilon(1e-4));
  for (Index i = 0; i < b.size(); ++i) {
    auto const &m = b[i];
    CHECK(b.index(m.label) == i);
    double const mag = m.label.n == 0 ? 1.0 : ep;
    CHECK(std::abs(m.energy) == doctest::Approx(mag).epsilon(1e-15));
    CHECK((m.energy > 0) == (m.label.band == Band::plus));
  }
  CHECK(b[0].label == ModeLabel{-1, Band::plus, Spin::up});
  CHECK(b[1].label == ModeLabel{-1, Band::plus, Spin::down});
  CHECK(b[2].label == ModeLabel{-1, Band::minus, Spin::up});
  CHECK(b[4].label == ModeLabel{0, Band::plus, Spin::up});
  CHECK(b[4].energy == 1.0);
  CHECK(b[6].energy == -1.0);
  CHECK(b.plus_indices() == std::vector<Index>{0, 1, 4, 5, 8, 9});
  CHECK(b.minus_indices() == std::vector<Index>{2, 3, 6, 7, 10, 11});
  CHECK_THROWS_AS(b.index({2, Band::plus, Spin::up}), ValidationError);
}

TEST_CASE("spinors are orthonormal free eigenvectors")
{
  for (Vector3 k0 : {Vector3(0, 0, 0), Vector3(0.3, -0.2, 0.11)}) {
    ModeBasis const b(3, 0.746, k0);
    for (Index i = 0; i < b.size(); ++i) {
      auto const &m = b[i];
      Matrix4c const h = dirac::free_hamiltonian(m.momentum);
      CHECK((h * m.spinor - m.energy * m.spinor).norm() < 1e-12);
      CHECK(m.spin_z >= -0.5 - 1e-15);
      CHECK(m.spin_z <= 0.5 + 1e-15);
    }
    for (int n = -3; n <= 3; ++n) {
      Matrix4c const s = b.spinor_block(n);
      CHECK((s.adjoint() * s - Matrix4c::Identity()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(Eigen::FullPivLU<Matrix4c>(s).rank() == 4);
    }
  }
}

TEST_CASE("spin and helicity along the z axis")
{
  ModeBasis const b(2, 0.746, Vector3::Zero());
  for (auto const &m : b.modes()) {
    double const s = m.label.spin == Spin::up ? 0.5 : -0.5;
    CHECK(m.spin_z == doctest::Approx(s).epsilon(1e-15));
    if (m.label.n == 0)
      CHECK(m.helicity == 0.0);
    else
      CHECK(m.helicity == doctest::Approx(m.label.n > 0 ? s : -s).epsilon(1e-15));
  }
  // A positron is a vacancy: spin reversed, helicity kept.
  auto const &hole = b[b.index({1, Band::minus, Spin::up})];
  CHECK(particle_spin_z(hole) == doctest::Approx(-0.5));
  CHECK(particle_helicity(hole) == doctest::Approx(0.5));
  auto const &el = b[b.index({1, Band::plus, Spin::up})];
  CHECK(particle_spin_z(el) == doctest::Approx(0.5));
}

TEST_CASE("charge conjugation pairs p with -p and mirrored spin")
{
  // psi^c = i gamma^2 psi^* with gamma^2 = [[0, sigma_y], [-sigma_y, 0]].
  Matrix4c g2 = Matrix4c::Zero();
  Eigen::Matrix2cd sy;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  g2.topRightCorner<2, 2>() = sy;
  g2.bottomLeftCorner<2, 2>() = -sy;
  Matrix4c const c = Complex(0, 1) * g2;

  ModeBasis const b(2, 0.746, Vector3::Zero());
  for (auto const &m : b.modes()) {
    if (m.label.band != Band::plus)
      continue;
    Spin const flipped = m.label.spin == Spin::up ? Spin::down : Spin::up;
    auto const &partner = b[b.index({-m.label.n, Band::minus, flipped})];
    CHECK((partner.momentum + m.momentum).norm() < 1e-15);
    Spinor const conj = c * m.spinor.conjugate();
    CHECK(std::abs(partner.spinor.dot(conj)) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("free phase")
{
  ModeBasis const b(1, 0.746, Vector3::Zero());
  auto const &up = b[b.index({0, Band::plus, Spin::up})];
  CHECK(free_phase(up, 0.0) == Complex(1.0, 0.0));
  CHECK(std::abs(free_phase(up, 2 * kPi) - Complex(1.0, 0.0)) < 1e-15);
  auto const &neg = b[b.index({1, Band::minus, Spin::down})];
  Complex const expect = std::polar(1.0, std::sqrt(1.0 + 0.746 * 0.746));
  CHECK(std::abs(free_phase(neg, 1.0) - expect) < 1e-15);
  CHECK(std::abs(expect - std::polar(1.0, 1.2476)) < 1e-4);
}

TEST_CASE("basis table csv")
{
  ModeBasis const b(1, 0.5, Vector3::Zero());
  std::ostringstream out;
  write_basis_csv(out, b);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,n,band,spin,p_x,p_y,p_z,energy,spin_z,helicity");
  int rows = 0;
  while (std::getline(in, line))
    ++rows;
  CHECK(rows == 12);
}
