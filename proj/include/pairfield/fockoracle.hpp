#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "dynamics.hpp"
#include "modebasis.hpp"
#include "physconfig.hpp"
#include "types.hpp"

/// Exact Fock-space check of the pair amplitudes on a small mode set.
///
/// The field operator is expanded as psi = sum_e a_e phi+_e + sum_p b+_p phi-_p,
/// so the many-body Hamiltonian is sum_ij h_ij psi+_i psi_j with the full
/// (not normal-ordered) Dirac-sea energy. The vacuum is then propagated with
/// the same time grid and midpoint rule as the single-particle dynamics.
///
/// Occupations are stored as Jordan-Wigner bit patterns: positrons take bits
/// 0 .. Mp-1, electrons bits Mp .. Mp+Me-1, and a pattern stands for the
/// product of creation operators in ascending bit order acting on |0>.
namespace pairfield {

using SparseMatrixXc = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

class FockBasis
{
public:
  /// All charge-zero patterns (equal electron and positron counts).
  FockBasis(int electron_modes, int positron_modes);

  int electron_modes() const noexcept { return me_; }
  int positron_modes() const noexcept { return mp_; }
  Index size() const noexcept { return static_cast<Index>(patterns_.size()); }

  std::uint32_t pattern(Index i) const { return patterns_[static_cast<std::size_t>(i)]; }
  /// -1 when the pattern is not in the basis.
  Index index(std::uint32_t pattern) const;

  int electron_bit(int e) const noexcept { return mp_ + e; }
  int positron_bit(int p) const noexcept { return p; }
  int pairs(Index i) const;

private:
  int me_;
  int mp_;
  std::vector<std::uint32_t> patterns_;
  std::unordered_map<std::uint32_t, Index> lookup_;
};

struct ManyBodyState
{
  VectorXc amplitudes;

  double norm() const { return amplitudes.norm(); }
};

/// Maximum single-particle basis size accepted by the oracle.
inline constexpr Index kOracleMaxModes = 16;

/// Many-body matrix of sum_ij h_ij psi+_i psi_j over `fock`.
SparseMatrixXc second_quantize(HamiltonianMatrix const &h, ModeBasis const &basis, FockBasis const &fock);

/// Result of evolving |0> through the whole run.
struct OracleRun
{
  FockBasis fock;
  ManyBodyState state;
  double norm_drift = 0;
};

OracleRun propagate_vacuum(RunConfig const &config, ModeBasis const &basis);

/// <N_{m,n}|state> with |N> = b+_{n1}..b+_{nN} a+_{mN}..a+_{m1}|0>; labels as
/// in multipair (positions within each half basis), any order.
Complex read_amplitude(ManyBodyState const &state, FockBasis const &fock, std::span<int const> electrons,
                       std::span<int const> positrons);

/// sum over N-pair patterns of |amplitude|^2, N = 0 .. max.
std::vector<double> oracle_sector_probabilities(ManyBodyState const &state, FockBasis const &fock);

} // namespace pairfield
