#include "jminv/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jminv {

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (fa * fb > 0) throw InputError("brent_root: interval does not bracket a root");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (fb * fc > 0) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2 * m * s;
        q = 1 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2 * m * q * (q - r) - (b - a) * (r - 1));
        q = (q - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q; else p = -p;
      if (2 * p < std::min(3 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

GaussRule gauss_legendre(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule g;
  g.x = es.eigenvalues();
  g.w = 2.0 * es.eigenvectors().row(0).array().square().transpose();
  return g;
}

double derivative(const std::function<double(double)>& f, double x, double h) {
  const double d1 = (f(x + h) - f(x - h)) / (2 * h);
  const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
  return (4 * d2 - d1) / 3;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const int n = static_cast<int>(x_.size());
  if (n < 4 || y_.size() != x_.size()) throw InputError("CubicSpline: need >= 4 points");
  for (int i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw InputError("CubicSpline: abscissae not strictly increasing");
  // tridiagonal system for the second derivatives, natural ends
  m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    const double a = h0 / 6, b = (h0 + h1) / 3, cc = h1 / 6;
    const double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    const double den = b - a * c[i - 1];
    c[i] = cc / den;
    d[i] = (rhs - a * d[i - 1]) / den;
  }
  for (int i = n - 2; i >= 1; --i) m_[i] = d[i] - c[i] * m_[i + 1];
}

double CubicSpline::operator()(double t) const {
  const int n = static_cast<int>(x_.size());
  int i = static_cast<int>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
  i = std::clamp(i, 0, n - 2);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6;
}

NewtonResult damped_newton(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
    Eigen::VectorXd x,
    const std::function<bool(const Eigen::VectorXd&)>& admissible,
    const NewtonOptions& opt) {
  NewtonResult res;
  const Eigen::Index n = x.size();
  for (int it = 0; it < opt.max_iter; ++it) {
    const Eigen::VectorXd f = F(x);
    res.iterations = it;
    res.residual = f.cwiseAbs().maxCoeff();
    if (res.residual <= opt.tol) {
      res.x = x;
      res.converged = true;
      return res;
    }
    Eigen::MatrixXd J(f.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = opt.rel_step * std::max(1.0, std::abs(x[j]));
      Eigen::VectorXd xp = x;
      xp[j] += h;
      J.col(j) = (F(xp) - f) / h;
    }
    const Eigen::VectorXd dx = J.completeOrthogonalDecomposition().solve(-f);
    if (!dx.allFinite()) break;
    double t = 1.0;
    const double f0 = f.norm();
    bool accepted = false;
    while (t > 1e-10) {
      const Eigen::VectorXd xn = x + t * dx;
      if (admissible(xn)) {
        const Eigen::VectorXd fn = F(xn);
        if (fn.allFinite() && fn.norm() <= (1 - 1e-4 * t) * f0) {
          x = xn;
          accepted = true;
          break;
        }
      }
      t /= 2;
    }
    if (!accepted) break;
  }
  res.x = x;
  res.residual = F(x).cwiseAbs().maxCoeff();
  res.converged = res.residual <= opt.tol;
  return res;
}

}  // namespace jminv
