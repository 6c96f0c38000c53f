#include "jminv/basis.hpp"

#include <cmath>

namespace jminv {

namespace {

// log of n!/Gamma(n+ell+3/2)
double log_norm_ratio(int n, int ell) {
  return std::lgamma(n + 1.0) - std::lgamma(n + ell + 1.5);
}

cplx laguerre(int n, double alpha, cplx x) {
  cplx l0 = 1.0;
  if (n == 0) return l0;
  cplx l1 = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const cplx l2 = ((2.0 * k + 1.0 + alpha - x) * l1 - (k + alpha) * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

cplx sine_like_n(double rho, int ell, cplx q, int n) {
  const double nrm = std::sqrt(kPi * rho * std::exp(log_norm_ratio(n, ell)));
  return nrm * std::pow(q, ell + 1) * std::exp(-q * q / 2.0) * laguerre(n, ell + 0.5, q * q);
}

cplx cosine_like_n(double rho, int ell, cplx q, int n) {
  const double nrm = std::sqrt(kPi * rho * std::exp(log_norm_ratio(n, ell)));
  return nrm * std::tgamma(ell + 0.5) / (kPi * std::pow(q, ell)) * std::exp(-q * q / 2.0) *
         hyp1f1_series(-n - ell - 0.5, -ell + 0.5, q * q);
}

}  // namespace

void BasisConfig::validate() const {
  if (!(rho > 0)) throw InputError("basis: rho must be > 0");
  if (N < 2) throw InputError("basis: N must be >= 2");
  if (ell < 0) throw InputError("basis: ell must be >= 0");
}

double oscillator_fn(const BasisConfig& cfg, int n, double r) {
  const double x = r / cfg.rho;
  const double nrm = std::sqrt(2.0 * std::exp(log_norm_ratio(n, cfg.ell)) / cfg.rho);
  const double lag = laguerre(n, cfg.ell + 0.5, x * x).real();
  const double sgn = (n % 2) ? -1.0 : 1.0;
  return sgn * nrm * std::pow(x, cfg.ell + 1) * std::exp(-x * x / 2) * lag;
}

cplx hyp1f1_series(double a, double b, cplx z, int max_terms) {
  cplx sum = 1.0, term = 1.0;
  // terms keep growing until k ~ |z|
  const int cap = std::max(max_terms, static_cast<int>(4 * std::abs(z)) + 100);
  for (int k = 0; k < cap; ++k) {
    term *= (a + k) / (b + k) * z / (k + 1.0);
    sum += term;
    if (std::abs(term) < 1e-15 * std::abs(sum) && std::abs(term) > 0) return sum;
    if (term == 0.0) return sum;
  }
  throw ConvergenceError("hyp1f1_series: no convergence within term cap");
}

ReferenceSolutionTable reference_solutions(double rho, int ell, cplx q, int n_max) {
  if (q == 0.0) throw InputError("reference_solutions: q must be nonzero");
  if (n_max < 1) throw InputError("reference_solutions: n_max must be >= 1");
  ReferenceSolutionTable t;
  t.q = q;
  t.sine_like.resize(n_max + 1);
  t.cosine_like.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) t.sine_like[n] = sine_like_n(rho, ell, q, n);

  const cplx eps = q * q / 2.0;
  const bool imaginary = std::abs(q.real()) <= 1e-14 * std::abs(q) && q.imag() > 0;
  if (imaginary && q.imag() >= 0.5) {
    // C+ is the minimal solution here; ratios by backward continued fraction,
    // absolute scale from the Casoratian T_{n,n+1}(S_n C_{n+1} - C_n S_{n+1}) = rho q / 2.
    const double y = q.imag();
    const double root = std::sqrt(n_max + 2.0) + 40.0 / y;
    const int n_top = static_cast<int>(root * root) + 20;
    Eigen::VectorXcd r(n_max + 2);
    cplx rn = 0.0;
    for (int n = n_top; n >= 1; --n) {
      rn = -kinetic_offdiag(ell, n - 1) /
           ((kinetic_diag(ell, n) - eps) + kinetic_offdiag(ell, n) * rn);
      if (n <= n_max + 1) r[n] = rn;
    }
    const Eigen::VectorXcd S1 = [&] {
      Eigen::VectorXcd s(n_max + 2);
      s.head(n_max + 1) = t.sine_like;
      s[n_max + 1] = sine_like_n(rho, ell, q, n_max + 1);
      return s;
    }();
    t.cplus.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
      t.cplus[n] = (rho * q / 2.0) /
                   (kinetic_offdiag(ell, n) * (S1[n] * r[n + 1] - S1[n + 1]));
    const cplx I(0, 1);
    t.cosine_like = t.cplus - I * t.sine_like;
    t.cminus = t.cplus - 2.0 * I * t.sine_like;
    return t;
  }

  // Below n ~ |q|^2/4 the cosine-like solution decays with n and upward recursion
  // is swamped by the sine-like one; past it the series cancels badly, so switch there.
  const double q2 = std::norm(q);
  const int n_direct = std::min(n_max, std::max(1, static_cast<int>(std::ceil(q2 / 4))));
  for (int n = 0; n <= n_direct; ++n) t.cosine_like[n] = cosine_like_n(rho, ell, q, n);
  for (int n = n_direct; n < n_max; ++n)
    t.cosine_like[n + 1] = -(kinetic_offdiag(ell, n - 1) * t.cosine_like[n - 1] +
                             (kinetic_diag(ell, n) - eps) * t.cosine_like[n]) /
                           kinetic_offdiag(ell, n);
  const cplx I(0, 1);
  t.cplus = t.cosine_like + I * t.sine_like;
  t.cminus = t.cosine_like - I * t.sine_like;
  return t;
}

double recursion_residual(int ell, cplx q, const Eigen::VectorXcd& d) {
  const cplx eps = q * q / 2.0;
  const double scale = d.cwiseAbs().maxCoeff();
  double worst = 0;
  for (Eigen::Index n = 1; n + 1 < d.size(); ++n) {
    const int m = static_cast<int>(n);
    const cplx res = kinetic_offdiag(ell, m - 1) * d[n - 1] + (kinetic_diag(ell, m) - eps) * d[n] +
                     kinetic_offdiag(ell, m) * d[n + 1];
    worst = std::max(worst, std::abs(res) / scale);
  }
  return worst;
}

Eigen::VectorXd cosine_asymptotic_check(const ReferenceSolutionTable& table, double rho,
                                        int ell) {
  const double q = table.q.real();
  if (std::abs(table.q.imag()) > 0 || q < 3)
    throw InputError("cosine_asymptotic_check: needs real q >= 3");
  Eigen::VectorXd ratio(table.cosine_like.size());
  for (Eigen::Index n = 0; n < ratio.size(); ++n) {
    const int m = static_cast<int>(n);
    const double sgn = (m % 2) ? 1.0 : -1.0;  // (-1)^{n+1}
    const double amp =
        std::sqrt(rho / kPi * std::exp(std::lgamma(m + 1.0) + std::lgamma(m + ell + 1.5)));
    const double asym = sgn * amp * std::exp(q * q / 2 - (2.0 * m + ell + 2) * std::log(q));
    ratio[n] = table.cosine_like[n].real() / asym;
  }
  return ratio;
}

}  // namespace jminv
