#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pairfield/dynamics.hpp"
#include "pairfield/linalg.hpp"

using namespace pairfield;

namespace {

RunConfig small_config(int n_cut, int ramp, int plateau, int spc)
{
  RunConfig c;
  c.field = field_from_si(4.9e17, 0.746, 0.2 * kPi / 4, HelicityRelation::same);
  c.window = {ramp, plateau};
  c.numerics.n_cut = n_cut;
  c.numerics.steps_per_cycle = spc;
  return c;
}

// <phi_{n'}| alpha.A(z) |phi_n> by quadrature over one wavelength; the plane
// waves contribute e^{i (n - n') k z}.
Complex coupling_by_quadrature(ModeBasis const &b, Index row, Index col, FourierPotential const &pot)
{
  auto const &mr = b[row];
  auto const &mc = b[col];
  double const k = b.k();
  double const lambda = 2 * kPi / k;
  int const nodes = 64;
  Complex sum = 0;
  for (int i = 0; i < nodes; ++i) {
    double const z = lambda * i / nodes;
    Vector3 const a = pot.at(z, k);
    Matrix4c const m = a.x() * dirac::alpha(0) + a.y() * dirac::alpha(1) + a.z() * dirac::alpha(2);
    sum += std::polar(1.0, (mc.label.n - mr.label.n) * k * z) * mr.spinor.dot(m * mc.spinor);
  }
  return sum / double(nodes);
}

} // namespace

TEST_CASE("hamiltonian: free diagonal, hermiticity and nearest-neighbour sparsity")
{
  auto const c = small_config(2, 2, 1, 64);
  ModeBasis const b = build_basis(c.numerics, c.field);
  HamiltonianAssembler const assemble(b);

  auto const free = assemble(potential_at(0.0, c.field, c.window));
  CHECK(free == HamiltonianMatrix(b.energies().cast<Complex>().asDiagonal()));

  for (int i = 0; i < 100; ++i) {
    double const t = (0.05 + 4.9 * i / 100.0) * c.field.period();
    auto const h = assemble(potential_at(t, c.field, c.window));
    CHECK(hermiticity_defect(h) < 1e-13);
    for (Index r = 0; r < h.rows(); ++r)
      for (Index col = 0; col < h.cols(); ++col)
        if (std::abs(b[r].label.n - b[col].label.n) >= 2 ||
            (b[r].label.n == b[col].label.n && r != col))
          CHECK(h(r, col) == Complex(0, 0));
  }
}

TEST_CASE("hamiltonian couplings agree with real-space quadrature")
{
  auto const c = small_config(2, 2, 1, 64);
  ModeBasis const b = build_basis(c.numerics, c.field);
  double const t = 2.37 * c.field.period();
  auto const pot = potential_at(t, c.field, c.window);
  auto const h = assemble_hamiltonian(t, b, pot);
  // H = alpha.(p - qA) + beta m with q = -1.
  for (Index r = 0; r < b.size(); ++r)
    for (Index col = 0; col < b.size(); ++col)
      if (r != col)
        CHECK(std::abs(h(r, col) - coupling_by_quadrature(b, r, col, pot)) < 1e-13);
}

TEST_CASE("circular beam obeys the photon spin selection rule")
{
  // alpha_plus = 0: the +k beam is purely |l>, which raises spin_z by one
  // when absorbed (n -> n+1) and lowers it when emitted.
  auto c = small_config(2, 1, 1, 64);
  c.field.alpha_plus = 0.0;
  c.field.alpha_minus = kPi / 2;
  ModeBasis const b = build_basis(c.numerics, c.field);
  auto const pot = potential_at(1.3 * c.field.period(), c.field, c.window, Beams::plus_only);
  auto const h = HamiltonianAssembler(b)(pot);
  int nonzero = 0;
  for (Index r = 0; r < b.size(); ++r) {
    for (Index col = 0; col < b.size(); ++col) {
      if (b[r].label.n != b[col].label.n + 1)
        continue;
      bool const allowed = b[r].label.spin == Spin::up && b[col].label.spin == Spin::down;
      if (!allowed)
        CHECK(std::abs(h(r, col)) < 1e-15);
      else if (std::abs(h(r, col)) > 1e-6)
        ++nonzero;
    }
  }
  CHECK(nonzero > 0);
}

TEST_CASE("zero field gives free phases")
{
  auto c = small_config(2, 2, 3, 64);
  c.field.e_peak = 0.0;
  ModeBasis const b = build_basis(c.numerics, c.field);
  auto const u = propagate(c, b);
  double const t_out = c.window.total_cycles() * c.field.period();
  for (Index r = 0; r < b.size(); ++r)
    for (Index col = 0; col < b.size(); ++col) {
      Complex const expect = r == col ? free_phase(b[r], t_out) : Complex(0, 0);
      CHECK(std::abs(u.u(r, col) - expect) < 1e-12);
    }
  auto const g = extract_g_blocks(u, b);
  CHECK(g.g_pm.isZero(0.0));
  CHECK(g.g_mm.isDiagonal(1e-300));
}

TEST_CASE("second order convergence in the step size")
{
  // Fig. 2 field, n_cut = 2, ramp 1 and zero plateau (2 cycles).
  auto c = small_config(2, 1, 0, 32);
  ModeBasis const b = build_basis(c.numerics, c.field);
  auto run = [&](int spc) {
    c.numerics.steps_per_cycle = spc;
    return propagate(c, b).u;
  };
  MatrixXc const u1 = run(32), u2 = run(64), u3 = run(128);
  MatrixXc const ref = (4.0 * run(256) - run(128)) / 3.0;
  double const e1 = (u1 - ref).cwiseAbs().maxCoeff();
  double const e2 = (u2 - ref).cwiseAbs().maxCoeff();
  double const e3 = (u3 - ref).cwiseAbs().maxCoeff();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("time reversal and composition")
{
  auto const c = small_config(2, 1, 2, 128);
  ModeBasis const b = build_basis(c.numerics, c.field);
  std::int64_t const steps = c.window.total_cycles() * c.numerics.steps_per_cycle;
  auto const fwd = propagate_steps(c, b, 0, steps);
  auto const bwd = propagate_steps(c, b, 0, steps, Direction::backward);
  CHECK(bwd.t_begin == doctest::Approx(fwd.t_end));
  MatrixXc const id = MatrixXc::Identity(b.size(), b.size());
  CHECK((bwd.u * fwd.u - id).cwiseAbs().maxCoeff() < 1e-9);

  auto const first = propagate_steps(c, b, 0, 200);
  auto const rest = propagate_steps(c, b, 200, steps - 200);
  CHECK((rest.u * first.u - fwd.u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cycle composition")
{
  auto c = small_config(2, 1, 0, 128);
  ModeBasis const b = build_basis(c.numerics, c.field);
  auto const pieces = plateau_pieces(c, b);
  CHECK(pieces.on.envelope_begin == 0.0);
  CHECK(pieces.on.envelope_end == 1.0);
  CHECK(pieces.off.envelope_end == 0.0);

  auto const j0 = cycle_compose(pieces.on, pieces.cycle, pieces.off, 0);
  CHECK((j0.u - pieces.off.u * pieces.on.u).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((j0.u - propagate(c, b).u).cwiseAbs().maxCoeff() < 1e-10);

  for (int j : {1, 3}) {
    c.window.plateau_cycles = j;
    auto const direct = propagate(c, b);
    auto const composed = cycle_compose(pieces.on, pieces.cycle, pieces.off, j);
    CHECK((direct.u - composed.u).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(composed.steps == direct.steps);
  }
  CHECK_THROWS(cycle_compose(pieces.on, pieces.cycle, pieces.off, -1));
}

TEST_CASE("g blocks: column unitarity and endpoint guard")
{
  auto const c = small_config(2, 1, 1, 128);
  ModeBasis const b = build_basis(c.numerics, c.field);
  auto const u = propagate(c, b);
  auto const g = extract_g_blocks(u, b);
  CHECK(g.g_pm.rows() == b.half_size());
  CHECK(g.g_mm.cols() == b.half_size());
  CHECK(column_unitarity_defect(g) < 1e-10);
  for (Index col = 0; col < g.g_mm.cols(); ++col)
    CHECK(g.g_pm.col(col).squaredNorm() + g.g_mm.col(col).squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g.g_pm.cwiseAbs().maxCoeff() > 1e-4);

  auto const partial = propagate_steps(c, b, 0, 100);
  CHECK_THROWS_AS(extract_g_blocks(partial, b), Error);
}

TEST_CASE("binary matrix dump round trip")
{
  MatrixXc m(3, 2);
  m << Complex(1, 2), Complex(3, 4), Complex(-5, 0.25), Complex(0, 0), Complex(1e-300, -7), Complex(8, 9);
  std::stringstream buf;
  write_matrix(buf, m);
  CHECK(buf.str().size() == 16 + 6 * 16);
  CHECK(read_matrix(buf) == m);
}
