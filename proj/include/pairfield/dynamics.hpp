#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "fieldmodel.hpp"
#include "modebasis.hpp"
#include "physconfig.hpp"
#include "types.hpp"

/// Single-particle dynamics in the truncated mode basis.
///
/// H(t) = alpha.(p + eA(z,t)) + beta in the free-mode basis: the diagonal holds
/// the free energies, and the plane-wave potential couples momentum index n
/// only to n +- 1. The propagator is the time-ordered product of
/// exponential-midpoint steps exp(-i H(t_k + dt/2) dt) on a uniform grid of
/// `steps_per_cycle` steps per laser period, starting at t = 0.
namespace pairfield {

using HamiltonianMatrix = MatrixXc;

/// Builds H(t) for a fixed basis. Spinor products for the n -> n+1 coupling
/// blocks are precomputed once.
class HamiltonianAssembler
{
public:
  explicit HamiltonianAssembler(ModeBasis const &basis);

  HamiltonianMatrix operator()(FourierPotential const &pot) const;
  /// Writes into `h`, which must already be square of basis size.
  void assemble_into(FourierPotential const &pot, HamiltonianMatrix &h) const;

  ModeBasis const &basis() const noexcept { return *basis_; }

private:
  ModeBasis const *basis_;
  Eigen::VectorXd energies_;
  // coupling_[axis][n + n_cut] = S_{n+1}^dagger alpha_axis S_n
  std::array<std::vector<Matrix4c>, 3> coupling_;
};

HamiltonianMatrix assemble_hamiltonian(double t, ModeBasis const &basis, FourierPotential const &pot);

struct Propagator
{
  MatrixXc u;
  std::uint64_t config_hash = 0;
  std::int64_t steps = 0;
  double unitarity_defect = 0;
  double t_begin = 0;
  double t_end = 0;
  /// Envelope at both ends; G-block extraction needs both to vanish.
  double envelope_begin = 0;
  double envelope_end = 0;
};

enum class Direction
{
  forward,
  backward, ///< applies the inverse steps in reverse order
};

/// Propagates over grid steps [first_step, first_step + count). With
/// Direction::backward the result is the inverse of the forward propagator
/// over the same steps.
Propagator propagate_steps(RunConfig const &config, ModeBasis const &basis, std::int64_t first_step,
                           std::int64_t count, Direction direction = Direction::forward);

/// Full run from t_in = 0 to t_out = (2 ramp + plateau) periods.
Propagator propagate(RunConfig const &config, ModeBasis const &basis);

/// Turn-on, one plateau period and turn-off propagators. Because the ramps
/// and plateau span whole periods the carrier phase realigns, so these three
/// pieces cover every plateau length.
struct PlateauPieces
{
  Propagator on;
  Propagator cycle;
  Propagator off;
};

PlateauPieces plateau_pieces(RunConfig const &config, ModeBasis const &basis);

/// u_off * u_cycle^j * u_on by binary exponentiation.
Propagator cycle_compose(Propagator const &u_on, Propagator const &u_cycle, Propagator const &u_off,
                         std::int64_t j);

struct GBlocks
{
  MatrixXc g_pm; ///< rows: positive-energy out modes, cols: negative-energy in modes
  MatrixXc g_mm; ///< rows: negative-energy out modes, cols: negative-energy in modes
  MatrixXc g_pp;
  MatrixXc g_mp;
};

GBlocks extract_g_blocks(Propagator const &u, ModeBasis const &basis);

/// Max over negative-energy in-modes of | |G+- e_n|^2 + |G-- e_n|^2 - 1 |.
double column_unitarity_defect(GBlocks const &g);

/// Binary matrix layout: uint64 rows, uint64 cols, then rows*cols pairs of
/// IEEE-754 doubles (re, im) in row-major order, all little endian.
void write_matrix(std::ostream &out, MatrixXc const &m);
MatrixXc read_matrix(std::istream &in);

/// Writes U to `dir/propagator.bin` and G+-, G-- (in that order) to
/// `dir/gblocks.bin`.
void dump_propagator(std::filesystem::path const &dir, Propagator const &u, GBlocks const &g);

} // namespace pairfield
