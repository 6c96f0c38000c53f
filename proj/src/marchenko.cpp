#include "jminv/marchenko.hpp"

#include <cmath>

#include "jminv/basis.hpp"
#include "jminv/numerics.hpp"

namespace jminv {

namespace {
const cplx I(0, 1);
}

std::vector<Mat2c> asymptotic_coefficients(const ChannelSet& cs, double k, const Mat2c& S,
                                           int n_max) {
  const Kinematics kin = kinematics_at(cs, k);
  const auto t1 = reference_solutions(cs.rho, cs.ell1, kin.q1, n_max);
  const auto t2 = reference_solutions(cs.rho, cs.ell2, kin.q2, n_max);
  const cplx r21 = std::sqrt(kin.q2 / kin.q1), r12 = std::sqrt(kin.q1 / kin.q2);
  std::vector<Mat2c> f(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    Mat2c m;
    m(0, 0) = 0.5 * I * (t1.cminus[n] - t1.cplus[n] * S(0, 0));
    m(0, 1) = -0.5 * I * t1.cplus[n] * r21 * S(0, 1);
    m(1, 0) = -0.5 * I * t2.cplus[n] * r12 * S(1, 0);
    m(1, 1) = 0.5 * I * (t2.cminus[n] - t2.cplus[n] * S(1, 1));
    f[n] = m;
  }
  return f;
}

std::vector<Mat2c> bound_coefficients(const ChannelSet& cs, double kappa, int n_max) {
  const double s = std::sqrt(kappa * kappa + cs.delta);
  const auto t1 = reference_solutions(cs.rho, cs.ell1, I * cs.rho * kappa, n_max);
  const auto t2 = reference_solutions(cs.rho, cs.ell2, I * cs.rho * s, n_max);
  std::vector<Mat2c> f(n_max + 1, Mat2c::Zero());
  for (int n = 0; n <= n_max; ++n) {
    f[n](0, 0) = t1.cplus[n];
    f[n](1, 1) = t2.cplus[n];
  }
  return f;
}

Mat2 bound_weight(const BoundStateData& b) {
  return b.anc * b.anc.transpose();
}

double kernel_cutoff(const ChannelSet& cs, double k0) {
  const double eps_cut = eps_of_k(cs, k0) + 2.0 * (2 * cs.N + std::max(cs.ell1, cs.ell2)) + 25.0;
  return k_of_eps(cs, eps_cut);
}

std::vector<QuadNode> kernel_nodes(const ChannelSet& cs, double k0, const QuadratureOptions& q) {
  const GaussRule g = gauss_legendre(q.nodes);
  std::vector<QuadNode> out;
  // integrate over t in [lo, hi] with k = map(t), dk = jac(t) dt
  auto add = [&](double lo, double hi, auto map, auto jac, Region reg) {
    for (int p = 0; p < q.panels; ++p) {
      const double a = lo + (hi - lo) * p / q.panels, b = lo + (hi - lo) * (p + 1) / q.panels;
      for (int i = 0; i < q.nodes; ++i) {
        const double t = 0.5 * (b - a) * g.x[i] + 0.5 * (a + b);
        out.push_back({map(t), 0.5 * (b - a) * g.w[i] * jac(t), reg});
      }
    }
  };
  auto twice = [](double t) { return 2 * t; };
  const double sd = std::sqrt(cs.delta);
  if (k0 <= sd) throw InputError("kernel_nodes: k0 must exceed sqrt(delta)");
  if (cs.delta > 0) {
    const double h = std::sqrt(sd / 2);
    add(0.0, h, [](double t) { return t * t; }, twice, Region::Closed);
    add(0.0, h, [&](double t) { return sd - t * t; }, twice, Region::Closed);
  }
  add(0.0, std::sqrt(k0 - sd), [&](double t) { return sd + t * t; }, twice, Region::Open);
  add(k0, kernel_cutoff(cs, k0), [](double t) { return t; }, [](double) { return 1.0; },
      Region::Tail);
  return out;
}

double MarchenkoKernel::asymmetry() const {
  double worst = 0;
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m <= n_max; ++m)
      worst = std::max(worst, (q(n, m) - q(m, n).transpose()).cwiseAbs().maxCoeff());
  return worst;
}

MarchenkoKernel kernel_assemble(const KernelInputs& in, int n_max) {
  if (!in.provider) throw InputError("kernel_assemble: no S-matrix provider");
  const ChannelSet& cs = in.cs;
  const int dim = n_max + 1;
  std::vector<Mat2c> acc(dim * dim, Mat2c::Zero());
  for (const QuadNode& node : kernel_nodes(cs, in.k0, in.quad)) {
    if (node.region == Region::Closed && !in.include_closed) continue;
    if (node.region == Region::Open && !in.include_open) continue;
    const double k = node.k;
    std::vector<Mat2c> f;
    if (node.region == Region::Tail) {
      const Kinematics kin = kinematics_at(cs, k);
      const auto t1 = reference_solutions(cs.rho, cs.ell1, kin.q1, n_max);
      const auto t2 = reference_solutions(cs.rho, cs.ell2, kin.q2, n_max);
      f.assign(dim, Mat2c::Zero());
      for (int n = 0; n < dim; ++n) {
        f[n](0, 0) = t1.sine_like[n];
        f[n](1, 1) = t2.sine_like[n];
      }
    } else {
      Mat2c S = in.provider->smatrix(k);
      if (node.region == Region::Closed) {
        const cplx s12 = in.closed_s12 ? in.closed_s12(k) : cplx(0);
        S(0, 1) = S(1, 0) = s12;
        S(1, 1) = 0;  // multiplied by a zero weight below threshold
      }
      f = asymptotic_coefficients(cs, k, S, n_max);
    }
    const WeightMatrix P = weight_at(cs, k);
    const Eigen::Vector2d pw(P.p11, P.p22);
    const double wt = 2.0 / kPi * node.w;
    std::vector<Mat2c> fp(dim);
    for (int n = 0; n < dim; ++n) fp[n] = f[n] * pw.asDiagonal();
    for (int n = 0; n < dim; ++n)
      for (int m = 0; m < dim; ++m) acc[n * dim + m] += wt * fp[n] * f[m].adjoint();
  }
  for (const BoundStateData& b : in.bound) {
    const auto fb = bound_coefficients(cs, b.kappa, n_max);
    const Mat2c A = bound_weight(b).cast<cplx>();
    for (int n = 0; n < dim; ++n)
      for (int m = 0; m < dim; ++m) acc[n * dim + m] += fb[n] * A * fb[m].adjoint();
  }
  MarchenkoKernel K;
  K.n_max = n_max;
  K.blocks.resize(dim * dim);
  for (int i = 0; i < dim * dim; ++i) K.blocks[i] = acc[i].real();
  return K;
}

MarchenkoKernel kernel_assemble_checked(const KernelInputs& in, int n_max, double tol,
                                        double* change) {
  const MarchenkoKernel a = kernel_assemble(in, n_max);
  KernelInputs fine = in;
  fine.quad.nodes *= 2;
  const MarchenkoKernel b = kernel_assemble(fine, n_max);
  double worst = 0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    worst = std::max(worst, (a.blocks[i] - b.blocks[i]).cwiseAbs().maxCoeff());
  if (change) *change = worst;
  if (worst > tol)
    throw ConvergenceError("kernel quadrature not converged: doubling nodes changes Q by " +
                           std::to_string(worst));
  return b;
}

Mat2 KernelSolution::k_at(int m) const {
  if (m == n) return K;
  auto it = Koff.find(m);
  return it == Koff.end() ? Mat2::Zero() : it->second;
}

KernelSolution solve_kernel(const MarchenkoKernel& q, int n, int N) {
  KernelSolution sol;
  sol.n = n;
  if (n >= N - 1) return sol;  // boundary level: K = I
  const int hi = 2 * N - n - 2;
  if (hi > q.n_max) throw InputError("solve_kernel: kernel window too small");
  const int L = hi - n;
  Mat2 G = q.q(n, n);
  if (L > 0) {
    Eigen::MatrixXd Qb(2 * L, 2 * L), R(2, 2 * L);
    for (int i = 0; i < L; ++i) {
      R.block<2, 2>(0, 2 * i) = -q.q(n, n + 1 + i);
      for (int j = 0; j < L; ++j) Qb.block<2, 2>(2 * i, 2 * j) = q.q(n + 1 + i, n + 1 + j);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Qb.transpose());
    if (!(std::abs(lu.determinant()) > 0)) throw ConvergenceError("solve_kernel: singular block system");
    const Eigen::MatrixXd Mrow = lu.solve(R.transpose()).transpose();
    if (!Mrow.allFinite()) throw ConvergenceError("solve_kernel: degenerate kernel");
    for (int i = 0; i < L; ++i) {
      const int m = n + 1 + i;
      sol.M[m] = Mrow.block<2, 2>(0, 2 * i);
      G += sol.M[m] * q.q(m, n);
    }
  }
  const Mat2 Ginv = (0.5 * (G + G.transpose())).inverse();
  Eigen::LLT<Mat2> llt(Ginv);
  if (llt.info() != Eigen::Success) throw ConvergenceError("solve_kernel: kernel not positive definite");
  sol.K = Mat2(llt.matrixL()).transpose();
  for (const auto& [m, M] : sol.M) sol.Koff[m] = sol.K * M;
  return sol;
}

BandRow recover_band(const KernelSolution* prev, const KernelSolution& cur, const ChannelSet& cs) {
  const int n = cur.n;
  const Mat2 Kn = cur.K, Knp = cur.k_at(n + 1);
  const double sh = cs.threshold_eps();
  const double T1nn = kinetic_diag(cs.ell1, n), T2nn = kinetic_diag(cs.ell2, n);
  const double T1p = kinetic_offdiag(cs.ell1, n), T2p = kinetic_offdiag(cs.ell2, n);
  BandRow r;
  r.a1 = T1nn + Knp(0, 0) / Kn(0, 0) * T1p;
  r.a2 = T2nn + sh + Knp(1, 1) / Kn(1, 1) * T2p - Kn(0, 1) * Knp(1, 0) / (Kn(0, 0) * Kn(1, 1)) * T1p;
  r.u = Knp(1, 0) / Kn(0, 0) * T1p;
  if (n == 0) return r;
  if (!prev) throw InputError("recover_band: previous level required for n > 0");
  const Mat2 Km = prev->K, Kmn = prev->k_at(n);
  const double T1m = kinetic_offdiag(cs.ell1, n - 1), T2m = kinetic_offdiag(cs.ell2, n - 1);
  if (Km(0, 0) == 0 || Km(1, 1) == 0 || Kn(0, 0) == 0 || Kn(1, 1) == 0)
    throw ConvergenceError("recover_band: zero diagonal K");
  r.a1 += -Kn(0, 1) * Kmn(1, 0) / (Kn(0, 0) * Km(1, 1)) * T2m -
          (Kmn(0, 0) / Km(0, 0) - Km(0, 1) * Kmn(1, 0) / (Km(0, 0) * Km(1, 1))) * T1m;
  r.b1 = Kn(0, 0) / Km(0, 0) * T1m;
  r.a2 += -(Kmn(1, 1) / Km(1, 1) - Kn(0, 1) * Kmn(1, 0) / (Kn(0, 0) * Km(1, 1))) * T2m;
  r.b2 = Kn(1, 1) / Km(1, 1) * T2m;
  r.u += -Kmn(1, 0) * Kn(1, 1) / (Kn(0, 0) * Km(1, 1)) * T2m;
  r.v = Kn(0, 1) / Km(1, 1) * T2m - Km(0, 1) * Kn(0, 0) / (Km(1, 1) * Km(0, 0)) * T1m;
  return r;
}

Eigen::Vector3d last_row_targets(const KernelSolution& level, const ChannelSet& cs) {
  KernelSolution top;
  top.n = cs.N - 1;
  const BandRow r = recover_band(&level, top, cs);
  return {r.a1, r.a2, r.u};
}

QuasiTridiagonalHamiltonian full_marchenko_h(const MarchenkoKernel& q, const ChannelSet& cs) {
  const int N = cs.N;
  std::vector<KernelSolution> lv;
  for (int n = 0; n < N; ++n) lv.push_back(solve_kernel(q, n, N));
  auto h = QuasiTridiagonalHamiltonian::zeros(cs);
  for (int n = 0; n < N; ++n) {
    const BandRow r = recover_band(n > 0 ? &lv[n - 1] : nullptr, lv[n], cs);
    h.a1[n] = r.a1;
    h.b1[n] = r.b1;
    h.a2[n] = r.a2;
    h.b2[n] = r.b2;
    h.u[n] = r.u;
    h.v[n] = r.v;
  }
  return h;
}

}  // namespace jminv
