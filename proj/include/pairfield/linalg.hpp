#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "types.hpp"

namespace pairfield {

/// exp(-i H dt) for Hermitian H, through its eigendecomposition. The result
/// is unitary to roundoff regardless of the step size.
template <typename Derived>
MatrixX<std::complex<typename Derived::RealScalar>>
expm_hermitian(Eigen::MatrixBase<Derived> const &h, typename Derived::RealScalar dt)
{
  using Real = typename Derived::RealScalar;
  using C = std::complex<Real>;
  Eigen::SelfAdjointEigenSolver<MatrixX<C>> eig(h.derived());
  if (eig.info() != Eigen::Success)
    throw NumericalError("linalg", "Hermitian eigensolver did not converge");
  VectorX<C> phases(eig.eigenvalues().size());
  for (Index i = 0; i < phases.size(); ++i)
    phases(i) = std::polar(Real(1), -eig.eigenvalues()(i) * dt);
  // One Newton-Schulz step pulls the eigenvector basis back to orthonormal to
  // second order; the solver alone leaves ~1e-14 per step, which accumulates
  // linearly over long propagations.
  MatrixX<C> const &v0 = eig.eigenvectors();
  Index const n = v0.cols();
  MatrixX<C> const v = v0 * (Real(1.5) * MatrixX<C>::Identity(n, n) - Real(0.5) * (v0.adjoint() * v0));
  return v * phases.asDiagonal() * v.adjoint();
}

/// max_ij |(U^dagger U - I)_ij|
template <typename Derived>
typename Derived::RealScalar unitarity_defect(Eigen::MatrixBase<Derived> const &u)
{
  auto const n = u.cols();
  return (u.adjoint() * u - MatrixX<typename Derived::Scalar>::Identity(n, n))
      .cwiseAbs()
      .maxCoeff();
}

/// max_ij |H_ij - conj(H_ji)|
template <typename Derived>
typename Derived::RealScalar hermiticity_defect(Eigen::MatrixBase<Derived> const &h)
{
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

/// Binary power of a square matrix, base^exponent with exponent >= 0.
template <typename Derived>
MatrixX<typename Derived::Scalar> matrix_power(Eigen::MatrixBase<Derived> const &base,
                                               std::uint64_t exponent)
{
  using M = MatrixX<typename Derived::Scalar>;
  M result = M::Identity(base.rows(), base.cols());
  M square = base;
  while (exponent > 0) {
    if (exponent & 1U)
      result = square * result;
    exponent >>= 1U;
    if (exponent > 0)
      square = square * square;
  }
  return result;
}

/// Sign (+1/-1) of the permutation that sorts `labels` ascending, or 0 if any
/// label repeats.
template <typename Int>
int permutation_sign(std::vector<Int> labels)
{
  int sign = 1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j])
        return 0;
      if (labels[j] < labels[i])
        sign = -sign;
    }
  }
  return sign;
}

} // namespace pairfield
