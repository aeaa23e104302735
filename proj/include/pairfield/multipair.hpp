#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "modebasis.hpp"
#include "physconfig.hpp"
#include "types.hpp"

/// Pair content of the out state.
///
/// With omega = -G+- (G--)^-1 and C_v = det G--, the out state is
///   |out> = C_v sum_N (1/N!) sum_{m_i, n_i} prod_i omega_{m_i n_i} |N_{m,n}>,
///   |N_{m,n}> = b+_{n_1} ... b+_{n_N} a+_{m_N} ... a+_{m_1} |0>.
/// Summing over orderings collapses each unordered pair of label sets into a
/// determinant: for ascending labels the amplitude is C_v det(omega[{m},{n}]).
///
/// Electron labels index the positive-energy half basis and positron labels
/// the negative-energy half basis, both in ModeBasis order.
namespace pairfield {

struct PairAmplitudeMatrix
{
  MatrixXc omega; ///< rows: electron labels, cols: positron labels
  double cond_mm = 1;
};

struct VacuumAmplitude
{
  Complex c_v{1.0, 0.0};
  double log_abs = 0; ///< log |det G--|

  double probability() const noexcept { return std::exp(2.0 * log_abs); }
};

struct MultiPairAmplitude
{
  std::vector<int> electrons; ///< ascending
  std::vector<int> positrons; ///< ascending
  Complex amplitude{0.0, 0.0};
  bool pauli_excluded = false;

  int pairs() const noexcept { return static_cast<int>(electrons.size()); }
};

PairAmplitudeMatrix pair_amplitudes(GBlocks const &g, double cond_cap = 1e12);
VacuumAmplitude vacuum_amplitude(GBlocks const &g);

/// <N_{m,n}|out> for arbitrary label order; the result carries the parity of
/// the sorting permutations. Repeated labels give exactly zero.
MultiPairAmplitude multi_pair_amplitude(PairAmplitudeMatrix const &omega, VacuumAmplitude const &c_v,
                                        std::span<int const> electrons, std::span<int const> positrons);

/// Determinant of a square matrix of order <= 8 by partial-pivot elimination
/// on a stack buffer.
Complex small_determinant(MatrixXc const &m);

struct SinglePair
{
  int electron = 0;
  int positron = 0;
  double probability = 0; ///< |C_v omega_mn|^2
};

struct SectorEntry
{
  int pairs = 0;
  double probability = 0;       ///< c_N over the retained support
  double exact_probability = 0; ///< c_N without pruning (generating function)
  double pruned_mass = 0;       ///< exact - retained, clipped at 0
  bool pruning_flag = false;    ///< pruned_mass above 1e-3 of c_N
  std::optional<double> spin_plus, spin_minus, helicity_plus, helicity_minus;
};

struct SectorReport
{
  double vacuum_probability = 1;
  std::vector<SectorEntry> sectors; ///< N = 0 .. n_sector_max
  std::vector<SinglePair> retained_pairs; ///< |omega_mn|^2 >= threshold, by decreasing probability
  std::vector<int> retained_electrons;
  std::vector<int> retained_positrons;
  /// Largest states per sector N >= 1, by decreasing |c|^2.
  std::vector<std::vector<MultiPairAmplitude>> top_states;
  double tail_mass = 0;         ///< exact sum of c_N for N > n_sector_max
  double discarded_mass = 0;    ///< sum of pruned_mass plus tail_mass
  double enumerated_states = 0; ///< (subset, subset) pairs visited
};

/// Exact c_N = |C_v|^2 e_N(eigenvalues of omega^dagger omega) for N <= n_max,
/// with e_N the elementary symmetric polynomials.
std::vector<double> exact_sector_probabilities(PairAmplitudeMatrix const &omega, VacuumAmplitude const &c_v,
                                               int n_max);

/// c_N by enumeration over subsets of the retained electron and positron
/// labels.
SectorReport sector_probabilities(PairAmplitudeMatrix const &omega, VacuumAmplitude const &c_v,
                                  ModeBasis const &basis, NumericsParams const &numerics,
                                  std::size_t top_k = 16);

/// As sector_probabilities, additionally averaging total spin_z and helicity
/// of electrons (plus) and positrons (minus) over each sector. Sectors with
/// c_N = 0 leave the observables empty.
SectorReport sector_observables(PairAmplitudeMatrix const &omega, VacuumAmplitude const &c_v,
                                ModeBasis const &basis, NumericsParams const &numerics,
                                std::size_t top_k = 16);

std::string describe(ModeLabel const &label);

} // namespace pairfield
