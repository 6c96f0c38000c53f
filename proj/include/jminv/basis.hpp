#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jminv/types.hpp"

namespace jminv {

struct BasisConfig {
  double rho = 1.0;  ///< oscillator radius
  int N = 2;         ///< basis size per channel
  int ell = 0;       ///< orbital angular momentum

  void validate() const;
};

/// Diagonal element of the oscillator-basis kinetic energy (units of hbar*omega).
template <typename Scalar = double>
Scalar kinetic_diag(int ell, int n) {
  return Scalar(2 * n + ell + 1.5) / Scalar(2);
}

/// Element (n, n+1) of the kinetic energy; always negative.
template <typename Scalar = double>
Scalar kinetic_offdiag(int ell, int n) {
  using std::sqrt;
  return -sqrt(Scalar(n + 1) * Scalar(n + ell + 1.5)) / Scalar(2);
}

template <typename Scalar = double>
struct KineticMatrix {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag;     ///< n = 0..n_max
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> offdiag;  ///< (n, n+1), n = 0..n_max-1
};

template <typename Scalar = double>
KineticMatrix<Scalar> kinetic_matrix(int ell, int n_max) {
  if (n_max < 1) throw InputError("kinetic_matrix: n_max must be >= 1");
  KineticMatrix<Scalar> t;
  t.diag.resize(n_max + 1);
  t.offdiag.resize(n_max);
  for (int n = 0; n <= n_max; ++n) t.diag[n] = kinetic_diag<Scalar>(ell, n);
  for (int n = 0; n < n_max; ++n) t.offdiag[n] = kinetic_offdiag<Scalar>(ell, n);
  return t;
}

/// Normalized oscillator function phi_n(r) of the basis (1/sqrt(length) units).
double oscillator_fn(const BasisConfig& cfg, int n, double r);

/// Regular and irregular solutions of the free three-term recursion
/// at dimensionless momentum q, n = 0..n_max.
struct ReferenceSolutionTable {
  cplx q;
  Eigen::VectorXcd sine_like, cosine_like, cplus, cminus;
};

ReferenceSolutionTable reference_solutions(double rho, int ell, cplx q, int n_max);

/// Residual of the free recursion for interior n, relative to max|d|.
double recursion_residual(int ell, cplx q, const Eigen::VectorXcd& d);

/// Ratio of the cosine-like solution to its large-q asymptotic form, per n.
Eigen::VectorXd cosine_asymptotic_check(const ReferenceSolutionTable& table, double rho,
                                        int ell);

/// 1F1(a; b; z) by direct series, stopping at relative term 1e-15.
cplx hyp1f1_series(double a, double b, cplx z, int max_terms = 500);

}  // namespace jminv
