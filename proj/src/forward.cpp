#include "jminv/forward.hpp"

#include <cmath>

#include "jminv/basis.hpp"
#include "jminv/numerics.hpp"

namespace jminv {

namespace {

const cplx I(0, 1);

struct Edge {
  cplx cp0, cp1, cm0, cm1;  // C+ and C- at n = N-1 (0) and n = N (1)
};

Edge edge_values(double rho, int ell, cplx q, int N) {
  const auto t = reference_solutions(rho, ell, q, N);
  return {t.cplus[N - 1], t.cplus[N], t.cminus[N - 1], t.cminus[N]};
}

// (C^{s1}_{N-1}(q1) - P11 t1 C^{s1}_N(q1)) (C^{s2}_{N-1}(q2) - P22 t2 C^{s2}_N(q2))
//   - P12^2 t1 t2 C^{s1}_N(q1) C^{s2}_N(q2)
cplx a_form(const Edge& e1, bool plus1, const Edge& e2, bool plus2, const PFunctions& p,
            double t1, double t2) {
  const cplx c10 = plus1 ? e1.cp0 : e1.cm0, c11 = plus1 ? e1.cp1 : e1.cm1;
  const cplx c20 = plus2 ? e2.cp0 : e2.cm0, c21 = plus2 ? e2.cp1 : e2.cm1;
  return (c10 - p.p11 * t1 * c11) * (c20 - p.p22 * t2 * c21) -
         p.p12 * p.p12 * t1 * t2 * c11 * c21;
}

}  // namespace

QuasiTridiagonalHamiltonian QuasiTridiagonalHamiltonian::zeros(const ChannelSet& cs) {
  QuasiTridiagonalHamiltonian h;
  h.cs = cs;
  for (auto* v : {&h.a1, &h.b1, &h.a2, &h.b2, &h.u, &h.v}) *v = Eigen::VectorXd::Zero(cs.N);
  return h;
}

void QuasiTridiagonalHamiltonian::validate() const {
  cs.validate();
  for (const auto* v : {&a1, &b1, &a2, &b2, &u, &v})
    if (v->size() != cs.N) throw InputError("hamiltonian: band length must equal N");
  for (const auto* v : {&a1, &b1, &a2, &b2, &u, &v})
    if (!v->allFinite()) throw InputError("hamiltonian: non-finite band element");
}

QuasiTridiagonalHamiltonian free_hamiltonian(const ChannelSet& cs) {
  auto h = QuasiTridiagonalHamiltonian::zeros(cs);
  for (int n = 0; n < cs.N; ++n) {
    h.a1[n] = kinetic_diag(cs.ell1, n);
    h.a2[n] = kinetic_diag(cs.ell2, n) + cs.threshold_eps();
    if (n > 0) {
      h.b1[n] = kinetic_offdiag(cs.ell1, n - 1);
      h.b2[n] = kinetic_offdiag(cs.ell2, n - 1);
    }
  }
  return h;
}

QuasiTridiagonalHamiltonian random_hamiltonian(const ChannelSet& cs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> diag(-1.0, 6.0), off(-2.0, -0.2), cpl(-0.5, 0.5);
  auto h = QuasiTridiagonalHamiltonian::zeros(cs);
  for (int n = 0; n < cs.N; ++n) {
    h.a1[n] = diag(rng);
    h.a2[n] = diag(rng) + cs.threshold_eps();
    h.u[n] = cpl(rng);
    if (n > 0) {
      h.b1[n] = off(rng);
      h.b2[n] = off(rng);
      h.v[n] = cpl(rng);
    }
  }
  return h;
}

Eigen::MatrixXd dense(const QuasiTridiagonalHamiltonian& h) {
  const int N = h.N();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  for (int n = 0; n < N; ++n) {
    H(n, n) = h.a1[n];
    H(N + n, N + n) = h.a2[n];
    H(n, N + n) = H(N + n, n) = h.u[n];
    if (n > 0) {
      H(n, n - 1) = H(n - 1, n) = h.b1[n];
      H(N + n, N + n - 1) = H(N + n - 1, N + n) = h.b2[n];
      H(n, N + n - 1) = H(N + n - 1, n) = h.v[n];
    }
  }
  return H;
}

QuasiTridiagonalHamiltonian from_dense(const Eigen::MatrixXd& H, const ChannelSet& cs) {
  const int N = cs.N;
  if (H.rows() != 2 * N || H.cols() != 2 * N) throw InputError("from_dense: wrong matrix size");
  auto h = QuasiTridiagonalHamiltonian::zeros(cs);
  for (int n = 0; n < N; ++n) {
    h.a1[n] = H(n, n);
    h.a2[n] = H(N + n, N + n);
    h.u[n] = H(n, N + n);
    if (n > 0) {
      h.b1[n] = H(n, n - 1);
      h.b2[n] = H(N + n, N + n - 1);
      h.v[n] = H(n, N + n - 1);
    }
  }
  const double tol = 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((dense(h) - H).cwiseAbs().maxCoeff() > tol)
    throw InputError("from_dense: matrix is not symmetric quasi-tridiagonal");
  return h;
}

std::vector<SpectralTriplet> spectral_data(const QuasiTridiagonalHamiltonian& h) {
  const int N = h.N();
  // extended precision: small last-row components carry large relative error otherwise
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const MatL H = dense(h).cast<long double>();
  Eigen::SelfAdjointEigenSolver<MatL> es(H);
  std::vector<SpectralTriplet> out(2 * N);
  for (int j = 0; j < 2 * N; ++j) {
    long double zN = es.eigenvectors()(N - 1, j), zNN = es.eigenvectors()(2 * N - 1, j);
    const long double big = std::abs(zN) >= std::abs(zNN) ? zN : zNN;
    if (big < 0) {
      zN = -zN;
      zNN = -zNN;
    }
    out[j] = {static_cast<double>(es.eigenvalues()[j]), static_cast<double>(zN), static_cast<double>(zNN)};
  }
  return out;
}

PFunctions p_functions(const std::vector<SpectralTriplet>& tr, double eps) {
  PFunctions p;
  for (const auto& t : tr) {
    const double d = eps - t.lambda;
    if (std::abs(d) <= 1e-12) throw InputError("p_functions: energy coincides with a pole");
    p.p11 += t.zN * t.zN / d;
    p.p12 += t.zN * t.zNN / d;
    p.p22 += t.zNN * t.zNN / d;
  }
  return p;
}

ForwardEval smatrix_from_triplets(const std::vector<SpectralTriplet>& tr, const ChannelSet& cs,
                                  double k) {
  if (!(k > 0)) throw InputError("smatrix_from_triplets: k must be > 0");
  const Kinematics kin = kinematics_at(cs, k);
  if (kin.q2 == 0.0) throw InputError("smatrix_from_triplets: k at the channel-2 threshold");
  const int N = cs.N;
  double gap = 1e300;
  for (const auto& t : tr) gap = std::min(gap, std::abs(kin.eps - t.lambda));
  if (gap < 1e-9) {
    // S is regular at an eigenvalue while P is not: symmetric average around it
    const double h = 2e-6;
    const ForwardEval lo = smatrix_from_triplets(tr, cs, k_of_eps(cs, kin.eps - h));
    const ForwardEval hi = smatrix_from_triplets(tr, cs, k_of_eps(cs, kin.eps + h));
    return {0.5 * (lo.S + hi.S), 0.5 * (lo.dplus + hi.dplus)};
  }
  const PFunctions p = p_functions(tr, kin.eps);
  const double t1 = kinetic_offdiag(cs.ell1, N - 1), t2 = kinetic_offdiag(cs.ell2, N - 1);
  const Edge e1 = edge_values(cs.rho, cs.ell1, kin.q1, N);
  const Edge e2 = edge_values(cs.rho, cs.ell2, kin.q2, N);
  ForwardEval r;
  r.dplus = a_form(e1, true, e2, true, p, t1, t2);
  r.S(0, 0) = a_form(e1, false, e2, true, p, t1, t2) / r.dplus;
  r.S(1, 1) = a_form(e1, true, e2, false, p, t1, t2) / r.dplus;
  r.S(0, 1) = r.S(1, 0) =
      -I * cs.rho * cs.rho * std::sqrt(kin.k1) * std::sqrt(kin.k2) * p.p12 / r.dplus;
  return r;
}

SMatrixSample smatrix_from_h(const QuasiTridiagonalHamiltonian& h, double k) {
  return {k, smatrix_from_triplets(spectral_data(h), h.cs, k).S};
}

ImaginaryAxisEval eval_imaginary_axis(const std::vector<SpectralTriplet>& tr, const ChannelSet& cs,
                                      double kappa) {
  const int N = cs.N;
  const double s = std::sqrt(kappa * kappa + cs.delta);
  const double eps = -0.5 * cs.rho * cs.rho * kappa * kappa;
  const PFunctions p = p_functions(tr, eps);
  const double t1 = kinetic_offdiag(cs.ell1, N - 1), t2 = kinetic_offdiag(cs.ell2, N - 1);
  const Edge e1 = edge_values(cs.rho, cs.ell1, I * cs.rho * kappa, N);
  const Edge e2 = edge_values(cs.rho, cs.ell2, I * cs.rho * s, N);
  const cplx dp = a_form(e1, true, e2, true, p, t1, t2);
  const cplx n11 = a_form(e1, false, e2, true, p, t1, t2);
  ImaginaryAxisEval r;
  r.dplus = dp.real();
  r.dplus_imag = dp.imag();
  r.num11 = n11.real();
  r.num12 = cs.rho * cs.rho * std::sqrt(kappa * s) * p.p12;
  return r;
}

std::pair<cplx, cplx> residues_at(const std::vector<SpectralTriplet>& tr, const ChannelSet& cs,
                                  double kappa) {
  const auto e = eval_imaginary_axis(tr, cs, kappa);
  const double dg = derivative([&](double kk) { return eval_imaginary_axis(tr, cs, kk).dplus; },
                               kappa, 1e-5 * std::max(1.0, kappa));
  return {I * e.num11 / dg, I * e.num12 / dg};
}

std::vector<BoundStateData> bound_states_from_triplets(const std::vector<SpectralTriplet>& tr,
                                                       const ChannelSet& cs,
                                                       const BoundStateScan& scan) {
  const double kmax = scan.kappa_max > 0 ? scan.kappa_max : 10.0 / cs.rho;
  // D+ has simple poles at negative eigenvalues; remove them before scanning
  auto regular = [&](double kap) {
    const double eps = -0.5 * cs.rho * cs.rho * kap * kap;
    double val = eval_imaginary_axis(tr, cs, kap).dplus;
    for (const auto& t : tr)
      if (t.lambda < 0) val *= (eps - t.lambda);
    return val;
  };
  std::vector<BoundStateData> out;
  double k0 = kmax / scan.points, g0 = regular(k0);
  for (int i = 2; i <= scan.points; ++i) {
    const double k1 = kmax * i / scan.points, g1 = regular(k1);
    if (g0 * g1 < 0) {
      const double kap = brent_root(regular, k0, k1, 1e-14);
      const auto [r11, r12] = residues_at(tr, cs, kap);
      out.push_back(make_bound_state(cs, kap, r11, r12));
    }
    k0 = k1;
    g0 = g1;
  }
  return out;
}

std::vector<BoundStateData> bound_states_from_h(const QuasiTridiagonalHamiltonian& h,
                                                const BoundStateScan& scan) {
  return bound_states_from_triplets(spectral_data(h), h.cs, scan);
}

HamiltonianProvider::HamiltonianProvider(const QuasiTridiagonalHamiltonian& h)
    : cs_(h.cs), tr_(spectral_data(h)) {
  bound_ = bound_states_from_triplets(tr_, cs_);
}

Mat2c HamiltonianProvider::smatrix(double k) const {
  return smatrix_from_triplets(tr_, cs_, k).S;
}

}  // namespace jminv
