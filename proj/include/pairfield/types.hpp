#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pairfield {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXc = MatrixX<Complex>;
using VectorXc = VectorX<Complex>;
using Vector3 = Eigen::Vector3d;
using Vector3c = Eigen::Vector3cd;
using Spinor = Eigen::Vector4cd;
using Matrix4c = Eigen::Matrix4cd;

inline constexpr double kPi = 3.14159265358979323846;

/// Base of all library errors. The tag names the module that raised it.
class Error : public std::runtime_error
{
public:
  Error(std::string module, std::string const &what)
      : std::runtime_error(module + ": " + what), module_(std::move(module))
  {
  }
  std::string const &module() const noexcept { return module_; }

private:
  std::string module_;
};

/// Invalid input or configuration (CLI exit code 2).
class ValidationError : public Error
{
public:
  ValidationError(std::string module, std::vector<std::string> issues);
  std::vector<std::string> const &issues() const noexcept { return issues_; }

private:
  std::vector<std::string> issues_;
};

/// A numerical tolerance was violated (CLI exit code 3).
class NumericalError : public Error
{
public:
  using Error::Error;
};

} // namespace pairfield
