#include "jminv/spectral_inverse.hpp"

#include <algorithm>
#include <cmath>

#include "jminv/basis.hpp"
#include "jminv/numerics.hpp"

namespace jminv {

namespace {

const cplx I(0, 1);

struct Edge {
  cplx cp0, cp1, cm0, cm1;
};

Edge edge_values(double rho, int ell, cplx q, int N) {
  const auto t = reference_solutions(rho, ell, q, N);
  return {t.cplus[N - 1], t.cplus[N], t.cminus[N - 1], t.cminus[N]};
}

// Real-valued root function along a scan, with the square-root phase tracked.
struct Realized {
  double f;
  cplx value, sigma;
};

struct RootScan {
  std::function<cplx(double)> raw;    // D(eps)
  std::function<cplx(double)> phase;  // quantity whose square root makes D real
  cplx factor = 1.0;                  // extra constant multiplying D / sigma
  Realized at(double eps, cplx sigma_ref) const {
    const cplx d = raw(eps);
    const cplx s = sqrt_near(phase(eps), sigma_ref);
    const cplx v = factor * d / s;
    return {v.real(), v, s};
  }
};

struct Bracket {
  double lo, hi;
  cplx sigma;
};

std::vector<Bracket> scan_roots(const RootScan& rs, double lo, double hi, int points,
                                Extraction& ex) {
  std::vector<double> eps(points);
  std::vector<Realized> val(points);
  for (int i = 0; i < points; ++i) eps[i] = lo + (hi - lo) * (i + 0.5) / points;
  cplx sigma = std::sqrt(rs.phase(eps[0]));
  double re_max = 0, im_max = 0;
  for (int i = 0; i < points; ++i) {
    val[i] = rs.at(eps[i], sigma);
    sigma = val[i].sigma;
    re_max = std::max(re_max, std::abs(val[i].value.real()));
    im_max = std::max(im_max, std::abs(val[i].value.imag()));
  }
  ex.max_imag = std::max(ex.max_imag, re_max > 0 ? im_max / re_max : 0.0);
  std::vector<Bracket> out;
  for (int i = 0; i + 1 < points; ++i) {
    if (val[i].f == 0 || val[i].f * val[i + 1].f < 0) out.push_back({eps[i], eps[i + 1], val[i].sigma});
    // touching without crossing: possible double root
    if (i > 0 && val[i].f * val[i - 1].f > 0 && val[i].f * val[i + 1].f > 0 &&
        std::abs(val[i].f) < std::abs(val[i - 1].f) && std::abs(val[i].f) < std::abs(val[i + 1].f) &&
        std::abs(val[i].f) < 1e-6 * re_max)
      ex.warnings.push_back("possible double root near eps = " + std::to_string(eps[i]));
  }
  for (std::size_t j = 1; j < out.size(); ++j)
    if (out[j].lo - out[j - 1].lo < 2.5 * (hi - lo) / points)
      ex.warnings.push_back("closely spaced roots near eps = " + std::to_string(out[j].lo));
  return out;
}

double refine(const RootScan& rs, const Bracket& b, double xtol) {
  return brent_root([&](double e) { return rs.at(e, b.sigma).f; }, b.lo, b.hi, xtol);
}

double realized_derivative(const RootScan& rs, double lambda, cplx sigma) {
  const double h = 1e-5 * std::max(1.0, std::abs(lambda));
  return derivative([&](double e) { return rs.at(e, sigma).f; }, lambda, h);
}

}  // namespace

PtildeValues ptilde_open(const Mat2c& S, const ChannelSet& cs, double eps) {
  const int N = cs.N;
  const double k = k_of_eps(cs, eps);
  const Kinematics kin = kinematics_at(cs, k);
  const Edge e1 = edge_values(cs.rho, cs.ell1, kin.q1, N);
  const Edge e2 = edge_values(cs.rho, cs.ell2, kin.q2, N);
  const double t1 = kinetic_offdiag(cs.ell1, N - 1), t2 = kinetic_offdiag(cs.ell2, N - 1);
  const cplx s11 = S(0, 0), s22 = S(1, 1), s12sq = S(0, 1) * S(1, 0);
  PtildeValues p;
  p.D = (e1.cm1 - e1.cp1 * s11) * (e2.cm1 - e2.cp1 * s22) - e1.cp1 * e2.cp1 * s12sq;
  p.theta1 = ((e1.cm0 - e1.cp0 * s11) * (e2.cm1 - e2.cp1 * s22) - e1.cp0 * e2.cp1 * s12sq) / t1;
  p.theta2 = ((e1.cm1 - e1.cp1 * s11) * (e2.cm0 - e2.cp0 * s22) - e1.cp1 * e2.cp0 * s12sq) / t2;
  p.theta3 = I * cs.rho * cs.rho * std::sqrt(kin.k1 * kin.k2) * S(0, 1) / (t1 * t2);
  p.detS = S.determinant();
  return p;
}

PtildeClosed ptilde_closed(cplx s11, const ChannelSet& cs, double eps) {
  const int N = cs.N;
  const double q = std::sqrt(2 * eps);
  const Edge e1 = edge_values(cs.rho, cs.ell1, q, N);
  const double t1 = kinetic_offdiag(cs.ell1, N - 1);
  return {e1.cm1 - e1.cp1 * s11, (e1.cm0 - e1.cp0 * s11) / t1};
}

Extraction find_open_triplets(const SMatrixProvider& provider, const ChannelSet& cs, double k0,
                              const ScanOptions& opt) {
  if (!(k0 * k0 > cs.delta)) throw InputError("find_open_triplets: k0 must exceed sqrt(delta)");
  const double lo = cs.threshold_eps(), hi = eps_of_k(cs, k0);
  auto pt = [&](double eps) { return ptilde_open(provider.smatrix(k_of_eps(cs, eps)), cs, eps); };
  RootScan rs;
  rs.raw = [&](double e) { return pt(e).D; };
  rs.phase = [&](double e) { return provider.smatrix(k_of_eps(cs, e)).determinant(); };
  Extraction ex;
  for (const auto& b : scan_roots(rs, lo, hi, opt.points, ex)) {
    const double lam = refine(rs, b, opt.xtol);
    const cplx sigma = rs.at(lam, b.sigma).sigma;
    const double dprime = realized_derivative(rs, lam, sigma);
    const PtildeValues p = pt(lam);
    // P~12 = -Theta3 / D
    const cplx r11 = p.theta1 / sigma / dprime, r22 = p.theta2 / sigma / dprime,
               r12 = -p.theta3 / sigma / dprime;
    for (const cplx r : {r11, r12, r22})
      if (std::abs(r.imag()) > 1e-6 * std::max(1.0, std::abs(r)))
        ex.warnings.push_back("complex residue at eps = " + std::to_string(lam));
    if (r11.real() < -1e-10 || r22.real() < -1e-10)
      throw VerificationError("find_open_triplets: negative residue at eps = " + std::to_string(lam) +
                              " (non-unitary input?)");
    SpectralTriplet t;
    t.lambda = lam;
    // rank one: the smaller weight from r12 rather than from the square root of a tiny residue
    const double sgn = r12.real() < 0 ? -1.0 : 1.0;
    if (r11.real() >= r22.real()) {
      t.zN = std::sqrt(std::max(r11.real(), 0.0));
      t.zNN = t.zN > 0 ? r12.real() / t.zN : 0.0;
    } else {
      t.zNN = sgn * std::sqrt(std::max(r22.real(), 0.0));
      t.zN = std::abs(r12.real()) / std::abs(t.zNN);
    }
    ex.triplets.push_back(t);
    ex.residues.emplace_back(r11.real(), r12.real(), r22.real());
  }
  return ex;
}

Extraction find_closed_triplets(const SMatrixProvider& provider, const ChannelSet& cs,
                                const ScanOptions& opt) {
  Extraction ex;
  const double hi = cs.threshold_eps();
  if (hi <= 0) return ex;
  auto pt = [&](double eps) { return ptilde_closed(provider.smatrix(k_of_eps(cs, eps))(0, 0), cs, eps); };
  RootScan rs;
  rs.raw = [&](double e) { return pt(e).D; };
  rs.phase = [&](double e) { return provider.smatrix(k_of_eps(cs, e))(0, 0); };
  rs.factor = I;
  for (const auto& b : scan_roots(rs, 0.0, hi, opt.points, ex)) {
    const double lam = refine(rs, b, opt.xtol);
    const cplx sigma = rs.at(lam, b.sigma).sigma;
    const double dprime = realized_derivative(rs, lam, sigma);
    const cplx r = I * pt(lam).theta / sigma / dprime;
    if (r.real() < -1e-10)
      throw VerificationError("find_closed_triplets: negative residue at eps = " + std::to_string(lam));
    ex.triplets.push_back({lam, std::sqrt(std::max(r.real(), 0.0)), 0.0});
    ex.residues.emplace_back(r.real(), 0.0, 0.0);
  }
  return ex;
}

double closed_region_full_d_ratio(const SMatrixProvider& provider, const ChannelSet& cs,
                                  int points) {
  const double hi = cs.threshold_eps();
  double dmin = 1e300, dmax = 0;
  for (int i = 0; i < points; ++i) {
    const double eps = hi * (i + 0.5) / points;
    const double d = std::abs(ptilde_open(provider.smatrix(k_of_eps(cs, eps)), cs, eps).D);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  return dmin / dmax;
}

QuasiTridiagonalHamiltonian lanczos_reconstruct(const std::vector<SpectralTriplet>& tr,
                                                const ChannelSet& cs, LanczosReport* report) {
  const int N = cs.N;
  if (N < 1 || static_cast<int>(tr.size()) != 2 * N)
    throw InputError("lanczos_reconstruct: need exactly 2N triplets");
  Eigen::VectorXd lam(2 * N);
  Eigen::MatrixXd W(2 * N, 2);
  for (int j = 0; j < 2 * N; ++j) {
    lam[j] = tr[j].lambda;
    W(j, 0) = tr[j].zN;
    W(j, 1) = tr[j].zNN;
  }
  const Mat2 G = W.transpose() * W;
  const double viol = (G - Mat2::Identity()).cwiseAbs().maxCoeff();
  if (report) report->constraint_violation = viol;
  if (viol > 1e-4)
    throw InputError("lanczos_reconstruct: triplets violate orthonormality by " + std::to_string(viol));
  if (viol > 1e-14) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(G);
    W = W * es.operatorInverseSqrt();
    if (report) report->repaired = true;
  }

  // accumulate in extended precision; small trailing weights amplify rounding
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  using Mat2L = Eigen::Matrix<long double, 2, 2>;
  const VecL lamL = lam.cast<long double>();
  auto h = QuasiTridiagonalHamiltonian::zeros(cs);
  const long double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  MatL Wn = W.cast<long double>(), Wnext;
  Mat2L Bnext = Mat2L::Zero();
  std::vector<MatL> done;
  for (int n = N - 1; n >= 0; --n) {
    const MatL LW = lamL.asDiagonal() * Wn;
    const Mat2L A = Wn.transpose() * LW;
    h.a1[n] = static_cast<double>(A(0, 0));
    h.a2[n] = static_cast<double>(A(1, 1));
    h.u[n] = static_cast<double>(0.5L * (A(0, 1) + A(1, 0)));
    if (n == 0) break;
    MatL R = LW - Wn * A;
    if (n < N - 1) R -= Wnext * Bnext;
    done.push_back(Wn);
    // full reorthogonalization, two passes
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& P : done) R -= P * (P.transpose() * R);
    // R = W_{n-1} B_n^T with B_n = [[b1, v], [0, b2]]: the channel-2 column fixes w1
    const long double b2 = -R.col(1).norm();
    if (std::abs(b2) < 1e-13L * scale) throw InputError("lanczos_reconstruct: breakdown (singular data)");
    const VecL w1 = R.col(1) / b2;
    const long double v = w1.dot(R.col(0));
    const VecL r0 = R.col(0) - v * w1;
    const long double b1 = -r0.norm();
    if (std::abs(b1) < 1e-13L * scale) throw InputError("lanczos_reconstruct: breakdown (singular data)");
    h.b1[n] = static_cast<double>(b1);
    h.b2[n] = static_cast<double>(b2);
    h.v[n] = static_cast<double>(v);
    Bnext << b1, v, 0, b2;
    Wnext = Wn;
    Wn.resize(2 * N, 2);
    Wn.col(0) = r0 / b1;
    Wn.col(1) = w1;
  }
  return h;
}

PotentialMatrix potential_from_h(const QuasiTridiagonalHamiltonian& h) {
  return {h.cs, dense(h) - dense(free_hamiltonian(h.cs))};
}

double potential_kernel(const PotentialMatrix& vm, int alpha, int beta, double r, double r_prime) {
  const int N = vm.cs.N;
  Eigen::VectorXd pa(N), pb(N);
  const BasisConfig ca{vm.cs.rho, N, vm.cs.ell(alpha)}, cb{vm.cs.rho, N, vm.cs.ell(beta)};
  for (int n = 0; n < N; ++n) {
    pa[n] = oscillator_fn(ca, n, r);
    pb[n] = oscillator_fn(cb, n, r_prime);
  }
  return pa.dot(vm.v.block(alpha * N, beta * N, N, N) * pb);
}

}  // namespace jminv
