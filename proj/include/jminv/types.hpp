#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace jminv {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;
using Mat2 = Eigen::Matrix2d;

/// Bad input or violated precondition.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative procedure failed to converge.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A consistency check on data failed (symmetry, unitarity, ...).
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace jminv
