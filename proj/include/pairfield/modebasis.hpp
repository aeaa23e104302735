#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "physconfig.hpp"
#include "types.hpp"

namespace pairfield {

enum class Band
{
  plus,
  minus
};
enum class Spin
{
  up,
  down
};

struct ModeLabel
{
  int n = 0;
  Band band = Band::plus;
  Spin spin = Spin::up;

  friend bool operator==(ModeLabel const &, ModeLabel const &) = default;
};

/// A free Dirac plane-wave mode with momentum n k e_z + k0, normalised in a
/// periodic box of one wavelength along z.
struct FreeMode
{
  ModeLabel label;
  Vector3 momentum;
  double energy = 0; ///< signed, +-sqrt(1 + p^2)
  Spinor spinor;
  double spin_z = 0;   ///< <Sigma_z / 2>
  double helicity = 0; ///< <Sigma.p/|p| / 2>, zero at p = 0
};

/// Dirac-representation matrices.
namespace dirac {
Matrix4c alpha(int axis);
Matrix4c beta();
Matrix4c sigma(int axis); ///< 4x4 spin matrix Sigma_axis = diag(sigma, sigma)
Matrix4c free_hamiltonian(Vector3 const &p);
} // namespace dirac

/// Analytic positive/negative-energy spinor; the spin label selects the
/// two-component seed (1,0) or (0,1).
Spinor free_spinor(Vector3 const &p, Band band, Spin spin);

class ModeBasis
{
public:
  ModeBasis(int n_cut, double k, Vector3 const &k0);

  int n_cut() const noexcept { return n_cut_; }
  double k() const noexcept { return k_; }
  Vector3 const &k0() const noexcept { return k0_; }

  Index size() const noexcept { return static_cast<Index>(modes_.size()); }
  /// Number of momenta, 2 n_cut + 1; also the count of electron and positron
  /// modes per spin.
  int momenta() const noexcept { return 2 * n_cut_ + 1; }
  /// Size of each band, 2 (2 n_cut + 1).
  Index half_size() const noexcept { return size() / 2; }

  FreeMode const &operator[](Index i) const { return modes_[static_cast<std::size_t>(i)]; }
  std::vector<FreeMode> const &modes() const noexcept { return modes_; }

  Index index(ModeLabel const &label) const;

  /// Full-basis indices of the positive-energy (electron) modes, in basis
  /// order. Position in this list is the electron label used by multipair.
  std::vector<Index> const &plus_indices() const noexcept { return plus_; }
  std::vector<Index> const &minus_indices() const noexcept { return minus_; }

  /// Columns: the four spinors at momentum index n in basis order.
  Matrix4c spinor_block(int n) const;

  /// Diagonal of free energies.
  Eigen::VectorXd energies() const;

private:
  int n_cut_;
  double k_;
  Vector3 k0_;
  std::vector<FreeMode> modes_;
  std::vector<Index> plus_;
  std::vector<Index> minus_;
};

ModeBasis build_basis(NumericsParams const &numerics, FieldParams const &field);

/// e^{-i E duration}
Complex free_phase(FreeMode const &mode, double duration) noexcept;

/// Physical spin/helicity of a created particle occupying `mode`. A positron
/// is the absence of a negative-energy electron: its spin is reversed and its
/// helicity equals that of the vacated mode.
double particle_spin_z(FreeMode const &mode) noexcept;
double particle_helicity(FreeMode const &mode) noexcept;

/// CSV columns: index,n,band,spin,p_x,p_y,p_z,energy,spin_z,helicity
void write_basis_csv(std::ostream &out, ModeBasis const &basis);

} // namespace pairfield
