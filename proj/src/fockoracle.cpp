#include "pairfield/fockoracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <string>

#include "pairfield/linalg.hpp"

namespace pairfield {

namespace {

struct Applied
{
  std::uint32_t pattern = 0;
  int sign = 0; ///< 0 when the operator annihilates the state
};

int parity_below(std::uint32_t pattern, int bit)
{
  std::uint32_t const below = pattern & ((std::uint32_t{1} << bit) - 1U);
  return (std::popcount(below) & 1) ? -1 : 1;
}

Applied create(Applied in, int bit)
{
  std::uint32_t const mask = std::uint32_t{1} << bit;
  if (in.sign == 0 || (in.pattern & mask))
    return {};
  return {in.pattern | mask, in.sign * parity_below(in.pattern, bit)};
}

Applied annihilate(Applied in, int bit)
{
  std::uint32_t const mask = std::uint32_t{1} << bit;
  if (in.sign == 0 || !(in.pattern & mask))
    return {};
  return {in.pattern & ~mask, in.sign * parity_below(in.pattern, bit)};
}

/// Fermionic role of each single-particle basis index.
struct ModeRole
{
  bool electron = true;
  int bit = 0;
};

std::vector<ModeRole> mode_roles(ModeBasis const &basis, FockBasis const &fock)
{
  std::vector<ModeRole> roles(static_cast<std::size_t>(basis.size()));
  auto const &plus = basis.plus_indices();
  auto const &minus = basis.minus_indices();
  for (std::size_t e = 0; e < plus.size(); ++e)
    roles[static_cast<std::size_t>(plus[e])] = {true, fock.electron_bit(static_cast<int>(e))};
  for (std::size_t p = 0; p < minus.size(); ++p)
    roles[static_cast<std::size_t>(minus[p])] = {false, fock.positron_bit(static_cast<int>(p))};
  return roles;
}

/// psi+_i psi_j |pattern>, with psi_e = a_e and psi_p = b+_p.
Applied apply_hopping(std::uint32_t pattern, ModeRole const &i, ModeRole const &j)
{
  Applied s{pattern, 1};
  s = j.electron ? annihilate(s, j.bit) : create(s, j.bit);
  s = i.electron ? create(s, i.bit) : annihilate(s, i.bit);
  return s;
}

void check_oracle_size(ModeBasis const &basis)
{
  if (basis.size() > kOracleMaxModes) {
    throw ValidationError("fockoracle", {"basis of " + std::to_string(basis.size()) +
                                             " modes exceeds the oracle limit of " +
                                             std::to_string(kOracleMaxModes) + " (use n_cut <= 1)"});
  }
}

/// Fixed sparsity pattern of the many-body Hamiltonian; per time step only
/// the values are refilled from h(t).
class FockHamiltonian
{
public:
  FockHamiltonian(ModeBasis const &basis, FockBasis const &fock)
  {
    auto const roles = mode_roles(basis, fock);
    std::vector<Eigen::Triplet<Complex>> triplets;
    struct Raw
    {
      Index row, col;
      int sign;
    };
    std::vector<std::vector<Raw>> raw;
    for (Index i = 0; i < basis.size(); ++i) {
      for (Index j = 0; j < basis.size(); ++j) {
        if (std::abs(basis[i].label.n - basis[j].label.n) > 1)
          continue;
        std::vector<Raw> moves;
        for (Index col = 0; col < fock.size(); ++col) {
          Applied const a = apply_hopping(fock.pattern(col), roles[static_cast<std::size_t>(i)],
                                          roles[static_cast<std::size_t>(j)]);
          if (a.sign == 0)
            continue;
          Index const row = fock.index(a.pattern);
          if (row < 0)
            throw Error("fockoracle", "hopping left the charge-zero sector");
          moves.push_back({row, col, a.sign});
          triplets.emplace_back(row, col, Complex(1.0, 0.0));
        }
        pairs_.push_back({i, j});
        raw.push_back(std::move(moves));
      }
    }
    matrix_.resize(fock.size(), fock.size());
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    matrix_.makeCompressed();

    moves_.resize(raw.size());
    for (std::size_t p = 0; p < raw.size(); ++p) {
      for (auto const &m : raw[p])
        moves_[p].push_back({slot(m.row, m.col), m.sign});
    }
  }

  SparseMatrixXc const &fill(HamiltonianMatrix const &h)
  {
    Complex *values = matrix_.valuePtr();
    std::fill(values, values + matrix_.nonZeros(), Complex(0.0, 0.0));
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      Complex const hij = h(pairs_[p].first, pairs_[p].second);
      if (hij == Complex(0.0, 0.0))
        continue;
      for (auto const &m : moves_[p])
        values[m.slot] += static_cast<double>(m.sign) * hij;
    }
    return matrix_;
  }

private:
  struct Move
  {
    Index slot;
    int sign;
  };

  Index slot(Index row, Index col) const
  {
    auto const *outer = matrix_.outerIndexPtr();
    auto const *inner = matrix_.innerIndexPtr();
    auto const *first = inner + outer[row];
    auto const *last = inner + outer[row + 1];
    auto const *it = std::lower_bound(first, last, static_cast<SparseMatrixXc::StorageIndex>(col));
    return static_cast<Index>(it - inner);
  }

  std::vector<std::pair<Index, Index>> pairs_;
  std::vector<std::vector<Move>> moves_;
  SparseMatrixXc matrix_;
};

/// exp(-i H dt) v by a Taylor series, split into substeps so that each has
/// ||H dt_sub|| <= 1/2.
VectorXc apply_exponential(SparseMatrixXc const &h, double dt, VectorXc const &v)
{
  double bound = 0;
  for (Index r = 0; r < h.outerSize(); ++r) {
    double row = 0;
    for (SparseMatrixXc::InnerIterator it(h, r); it; ++it)
      row += std::abs(it.value());
    bound = std::max(bound, row);
  }
  int const substeps = std::max(1, static_cast<int>(std::ceil(2.0 * bound * std::abs(dt))));
  double const h_dt = dt / substeps;
  VectorXc out = v;
  VectorXc term(v.size());
  for (int s = 0; s < substeps; ++s) {
    term = out;
    VectorXc sum = out;
    for (int k = 1; k < 64; ++k) {
      term = (Complex(0.0, -h_dt / k)) * (h * term);
      sum += term;
      if (term.norm() <= 1e-17 * sum.norm())
        break;
    }
    out.swap(sum);
  }
  return out;
}

} // namespace

FockBasis::FockBasis(int electron_modes, int positron_modes) : me_(electron_modes), mp_(positron_modes)
{
  if (me_ < 0 || mp_ < 0 || me_ + mp_ > 30)
    throw ValidationError("fockoracle", {"unsupported Fock basis size"});
  std::uint32_t const full = std::uint32_t{1} << (me_ + mp_);
  std::uint32_t const pmask = (std::uint32_t{1} << mp_) - 1U;
  // Sorted by pair number, then by pattern value.
  for (int n = 0; n <= std::min(me_, mp_); ++n) {
    for (std::uint32_t pat = 0; pat < full; ++pat) {
      if (std::popcount(pat & pmask) == n && std::popcount(pat >> mp_) == n) {
        lookup_.emplace(pat, static_cast<Index>(patterns_.size()));
        patterns_.push_back(pat);
      }
    }
  }
}

Index FockBasis::index(std::uint32_t pattern) const
{
  auto const it = lookup_.find(pattern);
  return it == lookup_.end() ? -1 : it->second;
}

int FockBasis::pairs(Index i) const
{
  return std::popcount(pattern(i) >> mp_);
}

SparseMatrixXc second_quantize(HamiltonianMatrix const &h, ModeBasis const &basis, FockBasis const &fock)
{
  check_oracle_size(basis);
  if (h.rows() != basis.size() || h.cols() != basis.size())
    throw Error("fockoracle", "Hamiltonian dimension does not match basis");
  auto const roles = mode_roles(basis, fock);
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (Index i = 0; i < basis.size(); ++i) {
    for (Index j = 0; j < basis.size(); ++j) {
      if (h(i, j) == Complex(0.0, 0.0))
        continue;
      for (Index col = 0; col < fock.size(); ++col) {
        Applied const a = apply_hopping(fock.pattern(col), roles[static_cast<std::size_t>(i)],
                                        roles[static_cast<std::size_t>(j)]);
        if (a.sign != 0)
          triplets.emplace_back(fock.index(a.pattern), col, static_cast<double>(a.sign) * h(i, j));
      }
    }
  }
  SparseMatrixXc m(fock.size(), fock.size());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

OracleRun propagate_vacuum(RunConfig const &config, ModeBasis const &basis)
{
  check_oracle_size(basis);
  FockBasis fock(static_cast<int>(basis.plus_indices().size()), static_cast<int>(basis.minus_indices().size()));
  FockHamiltonian many_body(basis, fock);
  HamiltonianAssembler const assemble(basis);

  VectorXc state = VectorXc::Zero(fock.size());
  state(fock.index(0)) = 1.0;

  std::int64_t const steps =
      static_cast<std::int64_t>(config.window.total_cycles()) * config.numerics.steps_per_cycle;
  double const dt = config.field.period() / config.numerics.steps_per_cycle;
  HamiltonianMatrix h(basis.size(), basis.size());
  for (std::int64_t s = 0; s < steps; ++s) {
    double const t_mid = (static_cast<double>(s) + 0.5) * dt;
    assemble.assemble_into(potential_at(t_mid, config.field, config.window), h);
    state = apply_exponential(many_body.fill(h), dt, state);
  }

  OracleRun run{std::move(fock), {std::move(state)}, 0.0};
  run.norm_drift = std::abs(run.state.norm() - 1.0);
  if (run.norm_drift > 1e-8) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", run.norm_drift);
    throw NumericalError("fockoracle", std::string("norm drift ") + buf + " above 1e-8");
  }
  return run;
}

Complex read_amplitude(ManyBodyState const &state, FockBasis const &fock, std::span<int const> electrons,
                       std::span<int const> positrons)
{
  if (electrons.size() != positrons.size())
    throw ValidationError("fockoracle", {"electron and positron label counts differ"});
  for (int e : electrons)
    if (e < 0 || e >= fock.electron_modes())
      throw ValidationError("fockoracle", {"unknown electron label " + std::to_string(e)});
  for (int p : positrons)
    if (p < 0 || p >= fock.positron_modes())
      throw ValidationError("fockoracle", {"unknown positron label " + std::to_string(p)});

  // Build the ket operator by operator, rightmost first:
  // b+_{n1} .. b+_{nN} a+_{mN} .. a+_{m1} |0>.
  Applied ket{0, 1};
  for (int e : electrons)
    ket = create(ket, fock.electron_bit(e));
  for (auto it = positrons.rbegin(); it != positrons.rend(); ++it)
    ket = create(ket, fock.positron_bit(*it));
  if (ket.sign == 0)
    return {0.0, 0.0};
  Index const i = fock.index(ket.pattern);
  if (i < 0)
    throw ValidationError("fockoracle", {"pattern outside the charge-zero basis"});
  return static_cast<double>(ket.sign) * state.amplitudes(i);
}

std::vector<double> oracle_sector_probabilities(ManyBodyState const &state, FockBasis const &fock)
{
  std::vector<double> c(static_cast<std::size_t>(std::min(fock.electron_modes(), fock.positron_modes()) + 1), 0.0);
  for (Index i = 0; i < fock.size(); ++i)
    c[static_cast<std::size_t>(fock.pairs(i))] += std::norm(state.amplitudes(i));
  return c;
}

} // namespace pairfield
