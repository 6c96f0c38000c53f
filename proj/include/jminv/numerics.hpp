#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "jminv/types.hpp"

namespace jminv {

/// Brent's method on a bracket [a, b] with f(a) f(b) <= 0.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-13, int max_iter = 200);

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
struct GaussRule {
  Eigen::VectorXd x, w;
};
GaussRule gauss_legendre(int n);

/// Central difference, Richardson-extrapolated once.
double derivative(const std::function<double(double)>& f, double x, double h);

/// Natural cubic spline through (x_i, y_i); x strictly increasing, size >= 4.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;

 private:
  std::vector<double> x_, y_, m_;
};

/// Result of a damped Newton solve.
struct NewtonResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0;
  bool converged = false;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double rel_step = 1e-7;
};

/// Damped Newton with forward-difference Jacobian, least-squares steps and
/// Armijo backtracking. `admissible` rejects trial points outside the domain.
NewtonResult damped_newton(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
    Eigen::VectorXd x0,
    const std::function<bool(const Eigen::VectorXd&)>& admissible,
    const NewtonOptions& opt = {});

/// Principal square root with sign flipped to lie closest to `ref`.
inline cplx sqrt_near(cplx z, cplx ref) {
  cplx s = std::sqrt(z);
  return std::abs(s - ref) <= std::abs(-s - ref) ? s : -s;
}

}  // namespace jminv
