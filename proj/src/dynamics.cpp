#include "pairfield/dynamics.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pairfield/linalg.hpp"

namespace pairfield {

HamiltonianAssembler::HamiltonianAssembler(ModeBasis const &basis)
    : basis_(&basis), energies_(basis.energies())
{
  int const n_cut = basis.n_cut();
  for (int axis = 0; axis < 3; ++axis) {
    Matrix4c const a = dirac::alpha(axis);
    for (int n = -n_cut; n < n_cut; ++n)
      coupling_[axis].push_back(basis.spinor_block(n + 1).adjoint() * a * basis.spinor_block(n));
  }
}

HamiltonianMatrix HamiltonianAssembler::operator()(FourierPotential const &pot) const
{
  HamiltonianMatrix h(basis_->size(), basis_->size());
  assemble_into(pot, h);
  return h;
}

void HamiltonianAssembler::assemble_into(FourierPotential const &pot, HamiltonianMatrix &h) const
{
  Index const dim = basis_->size();
  if (h.rows() != dim || h.cols() != dim)
    throw Error("dynamics", "Hamiltonian buffer has wrong dimension");
  h.setZero();
  h.diagonal() = energies_.cast<Complex>();
  // e^{+ikz} raises n by one, with weight C+ + conj(C-).
  Vector3c const raise = pot.c_plus_k + pot.c_minus_k.conjugate();
  if (raise.isZero(0.0))
    return;
  for (std::size_t b = 0; b < coupling_[0].size(); ++b) {
    Matrix4c const block = raise.x() * coupling_[0][b] + raise.y() * coupling_[1][b] + raise.z() * coupling_[2][b];
    Index const from = 4 * static_cast<Index>(b);
    h.block<4, 4>(from + 4, from) = block;
    h.block<4, 4>(from, from + 4) = block.adjoint();
  }
}

HamiltonianMatrix assemble_hamiltonian(double /*t*/, ModeBasis const &basis, FourierPotential const &pot)
{
  return HamiltonianAssembler(basis)(pot);
}

namespace {

double step_size(RunConfig const &config)
{
  return config.field.period() / config.numerics.steps_per_cycle;
}

double envelope_at_step(RunConfig const &config, std::int64_t step)
{
  return envelope(static_cast<double>(step) / config.numerics.steps_per_cycle, config.window);
}

std::string sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void check_unitarity(Propagator const &p, double tol)
{
  if (!(p.unitarity_defect <= tol)) {
    throw NumericalError("dynamics", "unitarity defect " + sci(p.unitarity_defect) + " exceeds " +
                                         sci(tol) + " after " + std::to_string(p.steps) +
                                         " steps; retry with at least " + std::to_string(2 * p.steps) +
                                         " steps over the interval");
  }
}

} // namespace

Propagator propagate_steps(RunConfig const &config, ModeBasis const &basis, std::int64_t first_step,
                           std::int64_t count, Direction direction)
{
  if (count < 0)
    throw Error("dynamics", "negative step count");
  double const dt = step_size(config);
  Index const dim = basis.size();
  HamiltonianAssembler const assemble(basis);
  Eigen::VectorXd const energies = basis.energies();
  double const sign = direction == Direction::forward ? 1.0 : -1.0;

  MatrixXc u = MatrixXc::Identity(dim, dim);
  HamiltonianMatrix h(dim, dim);
  MatrixXc scratch(dim, dim);
  // Consecutive free steps are merged into one diagonal phase; multiplying
  // unit phases step by step lets |U| drift by roundoff.
  std::int64_t free_steps = 0;
  auto flush_free = [&] {
    if (free_steps == 0)
      return;
    double const duration = sign * static_cast<double>(free_steps) * dt;
    for (Index r = 0; r < dim; ++r)
      u.row(r) *= std::polar(1.0, -energies(r) * duration);
    free_steps = 0;
  };
  for (std::int64_t s = 0; s < count; ++s) {
    std::int64_t const step = direction == Direction::forward ? first_step + s : first_step + count - 1 - s;
    double const t_mid = (static_cast<double>(step) + 0.5) * dt;
    FourierPotential const pot = potential_at(t_mid, config.field, config.window);
    if (pot.c_plus_k.isZero(0.0) && pot.c_minus_k.isZero(0.0)) {
      ++free_steps;
      continue;
    }
    flush_free();
    assemble.assemble_into(pot, h);
    scratch.noalias() = expm_hermitian(h, sign * dt) * u;
    u.swap(scratch);
  }
  flush_free();

  Propagator p;
  p.u = std::move(u);
  p.config_hash = config_hash(config);
  p.steps = count;
  p.unitarity_defect = unitarity_defect(p.u);
  double const t_first = static_cast<double>(first_step) * dt;
  double const t_last = static_cast<double>(first_step + count) * dt;
  p.t_begin = direction == Direction::forward ? t_first : t_last;
  p.t_end = direction == Direction::forward ? t_last : t_first;
  double const env_first = envelope_at_step(config, first_step);
  double const env_last = envelope_at_step(config, first_step + count);
  p.envelope_begin = direction == Direction::forward ? env_first : env_last;
  p.envelope_end = direction == Direction::forward ? env_last : env_first;
  check_unitarity(p, config.numerics.unitarity_tol);
  return p;
}

Propagator propagate(RunConfig const &config, ModeBasis const &basis)
{
  std::int64_t const steps =
      static_cast<std::int64_t>(config.window.total_cycles()) * config.numerics.steps_per_cycle;
  return propagate_steps(config, basis, 0, steps, Direction::forward);
}

PlateauPieces plateau_pieces(RunConfig const &config, ModeBasis const &basis)
{
  std::int64_t const spc = config.numerics.steps_per_cycle;
  std::int64_t const ramp_steps = config.window.ramp_cycles * spc;

  RunConfig with_plateau = config;
  with_plateau.window.plateau_cycles = 1;
  RunConfig no_plateau = config;
  no_plateau.window.plateau_cycles = 0;

  PlateauPieces pieces;
  pieces.on = propagate_steps(with_plateau, basis, 0, ramp_steps);
  pieces.cycle = propagate_steps(with_plateau, basis, ramp_steps, spc);
  pieces.off = propagate_steps(no_plateau, basis, ramp_steps, ramp_steps);
  for (Propagator *p : {&pieces.on, &pieces.cycle, &pieces.off})
    p->config_hash = config_hash(no_plateau);
  return pieces;
}

Propagator cycle_compose(Propagator const &u_on, Propagator const &u_cycle, Propagator const &u_off,
                         std::int64_t j)
{
  if (j < 0)
    throw ValidationError("dynamics", {"cycle_compose: j >= 0"});
  Propagator p;
  p.u = u_off.u * matrix_power(u_cycle.u, static_cast<std::uint64_t>(j)) * u_on.u;
  p.config_hash = u_on.config_hash;
  p.steps = u_on.steps + j * u_cycle.steps + u_off.steps;
  p.unitarity_defect = unitarity_defect(p.u);
  double const cycle_time = u_cycle.t_end - u_cycle.t_begin;
  p.t_begin = u_on.t_begin;
  p.t_end = u_on.t_end + static_cast<double>(j) * cycle_time + (u_off.t_end - u_off.t_begin);
  p.envelope_begin = u_on.envelope_begin;
  p.envelope_end = u_off.envelope_end;
  double const tol = std::max({u_on.unitarity_defect, u_cycle.unitarity_defect, u_off.unitarity_defect}) +
                     1e-10 + static_cast<double>(j) * 1e-12;
  check_unitarity(p, tol);
  return p;
}

GBlocks extract_g_blocks(Propagator const &u, ModeBasis const &basis)
{
  if (u.envelope_begin != 0.0 || u.envelope_end != 0.0)
    throw ValidationError("dynamics", {"extract_g_blocks: field must vanish at both endpoints"});
  if (u.u.rows() != basis.size() || u.u.cols() != basis.size())
    throw Error("dynamics", "propagator dimension does not match basis");
  auto const &plus = basis.plus_indices();
  auto const &minus = basis.minus_indices();
  Index const half = basis.half_size();
  GBlocks g;
  g.g_pm.resize(half, half);
  g.g_mm.resize(half, half);
  g.g_pp.resize(half, half);
  g.g_mp.resize(half, half);
  for (Index r = 0; r < half; ++r) {
    for (Index c = 0; c < half; ++c) {
      g.g_pm(r, c) = u.u(plus[r], minus[c]);
      g.g_mm(r, c) = u.u(minus[r], minus[c]);
      g.g_pp(r, c) = u.u(plus[r], plus[c]);
      g.g_mp(r, c) = u.u(minus[r], plus[c]);
    }
  }
  return g;
}

double column_unitarity_defect(GBlocks const &g)
{
  Eigen::VectorXd const sums = g.g_pm.colwise().squaredNorm() + g.g_mm.colwise().squaredNorm();
  return (sums.array() - 1.0).abs().maxCoeff();
}

static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");

void write_matrix(std::ostream &out, MatrixXc const &m)
{
  std::uint64_t const dims[2] = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  out.write(reinterpret_cast<char const *>(dims), sizeof dims);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      double const v[2] = {m(r, c).real(), m(r, c).imag()};
      out.write(reinterpret_cast<char const *>(v), sizeof v);
    }
  }
}

MatrixXc read_matrix(std::istream &in)
{
  std::uint64_t dims[2] = {0, 0};
  if (!in.read(reinterpret_cast<char *>(dims), sizeof dims))
    throw Error("dynamics", "truncated matrix header");
  MatrixXc m(static_cast<Index>(dims[0]), static_cast<Index>(dims[1]));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      double v[2];
      if (!in.read(reinterpret_cast<char *>(v), sizeof v))
        throw Error("dynamics", "truncated matrix data");
      m(r, c) = Complex(v[0], v[1]);
    }
  }
  return m;
}

void dump_propagator(std::filesystem::path const &dir, Propagator const &u, GBlocks const &g)
{
  std::filesystem::create_directories(dir);
  std::ofstream pu(dir / "propagator.bin", std::ios::binary);
  write_matrix(pu, u.u);
  std::ofstream pg(dir / "gblocks.bin", std::ios::binary);
  write_matrix(pg, g.g_pm);
  write_matrix(pg, g.g_mm);
  if (!pu || !pg)
    throw Error("dynamics", "failed writing binary dump to " + dir.string());
}

} // namespace pairfield
