#include "jminv/refmodel.hpp"

#include <algorithm>
#include <cmath>

namespace jminv {

namespace {
const cplx I(0, 1);
}

BoundStateData make_bound_state(const ChannelSet& cs, double kappa, cplx res11, cplx res12) {
  BoundStateData b;
  b.kappa = kappa;
  b.res11 = res11;
  b.res12 = res12;
  const double s = std::sqrt(kappa * kappa + cs.delta);
  // i Res S_ab = i^{l_a + l_b} sqrt(s_a s_b) / kappa * M_a M_b
  const cplx m11 = I * res11 / std::pow(I, 2 * cs.ell1);
  const cplx m12 = I * res12 / std::pow(I, cs.ell1 + cs.ell2) / std::sqrt(s / kappa);
  b.anc[0] = std::sqrt(std::max(m11.real(), 0.0));
  b.anc[1] = b.anc[0] > 0 ? m12.real() / b.anc[0] : 0.0;
  return b;
}

Mat2c model_smatrix(const AnalyticModelParams& p, cplx k) {
  const double a = p.a, b = p.b, x = p.x;
  cplx k2;
  if (k.imag() == 0 && k.real() * k.real() >= p.delta)
    k2 = std::sqrt(k.real() * k.real() - p.delta);
  else
    k2 = I * std::sqrt(p.delta - k * k);
  const double X = std::sqrt(x * x + p.delta);
  const double ab = a * a - b * b;
  const cplx g = ab - I * a * k - I * a * k2 - k * k2;
  const cplx den = (x + I * k) * g;
  Mat2c S;
  S(0, 0) = (x - I * k) * (ab + I * a * k - I * a * k2 + k * k2) / den;
  S(0, 1) = S(1, 0) = -2.0 * I * b * std::sqrt(k) * std::sqrt(k2) * (X - I * k2) / den;
  S(1, 1) = (X - I * k2) * (ab - I * a * k + I * a * k2 + k * k2) / ((X + I * k2) * g);
  return S;
}

Mat2c contour_residue(const std::function<Mat2c(cplx)>& S, cplx k0) {
  auto circle = [&](double r) {
    const int M = 64;
    Mat2c acc = Mat2c::Zero();
    for (int j = 0; j < M; ++j) {
      const cplx dz = r * std::exp(I * (2 * kPi * (j + 0.5) / M));
      acc += S(k0 + dz) * dz;
    }
    return Mat2c(acc / double(M));
  };
  const double r1 = 1e-2, r2 = 1e-3;
  const Mat2c a1 = circle(r1), a2 = circle(r2);
  return (a2 * r1 * r1 - a1 * r2 * r2) / (r1 * r1 - r2 * r2);
}

std::vector<BoundStateData> model_bound_states(const AnalyticModelParams& p, const ChannelSet& cs,
                                               double kappa_max) {
  // common denominator on the imaginary axis, k = i kappa, k2 = i sqrt(kappa^2 + delta)
  auto g = [&](double kap) {
    const double s = std::sqrt(kap * kap + p.delta);
    return p.a * p.a - p.b * p.b + p.a * (kap + s) + kap * s;
  };
  std::vector<BoundStateData> out;
  const int n = 4000;
  double prev_k = kappa_max * 1e-9, prev_g = g(prev_k);
  for (int i = 1; i <= n; ++i) {
    const double kk = kappa_max * i / n;
    const double gk = g(kk);
    if (prev_g == 0 || prev_g * gk < 0) {
      const double kap = prev_g == 0 ? prev_k : brent_root(g, prev_k, kk, 1e-15);
      const Mat2c res =
          contour_residue([&](cplx k) { return model_smatrix(p, k); }, cplx(0, kap));
      out.push_back(make_bound_state(cs, kap, res(0, 0), res(0, 1)));
    }
    prev_k = kk;
    prev_g = gk;
  }
  return out;
}

BoundStateData bound_state_of_model(const AnalyticModelParams& p, const ChannelSet& cs,
                                    double kappa_max) {
  auto all = model_bound_states(p, cs, kappa_max);
  if (all.empty()) throw ConvergenceError("bound_state_of_model: no pole found on the imaginary axis");
  return all.front();
}

AnalyticModel::AnalyticModel(const AnalyticModelParams& p, const ChannelSet& cs) : p_(p) {
  if (cs.delta != p.delta) throw InputError("AnalyticModel: threshold mismatch");
  bound_ = model_bound_states(p, cs);
}

TabulatedProvider::TabulatedProvider(std::vector<SMatrixSample> samples,
                                     std::vector<BoundStateData> bound)
    : bound_(std::move(bound)) {
  if (samples.size() < 4) throw InputError("tabulated data: need at least 4 samples");
  std::vector<double> k;
  std::vector<std::vector<double>> re(3), im(3);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (i > 0 && !(s.k > samples[i - 1].k))
      throw InputError("tabulated data: k not strictly increasing at record " + std::to_string(i));
    const double asym = std::abs(s.s(0, 1) - s.s(1, 0));
    if (asym > 1e-6)
      throw VerificationError("tabulated data: S12 != S21 at k = " + std::to_string(s.k) +
                              " (|diff| = " + std::to_string(asym) + ")");
    k.push_back(s.k);
    const cplx e[3] = {s.s(0, 0), 0.5 * (s.s(0, 1) + s.s(1, 0)), s.s(1, 1)};
    for (int j = 0; j < 3; ++j) {
      re[j].push_back(e[j].real());
      im[j].push_back(e[j].imag());
    }
  }
  kmin_ = k.front();
  kmax_ = k.back();
  for (int j = 0; j < 3; ++j) {
    re_.emplace_back(k, re[j]);
    im_.emplace_back(k, im[j]);
  }
}

Mat2c TabulatedProvider::smatrix(double k) const {
  const double slack = 1e-9 * (kmax_ - kmin_);
  if (k < kmin_ - slack || k > kmax_ + slack)
    throw InputError("tabulated data: k = " + std::to_string(k) + " outside sampled range");
  Mat2c S;
  S(0, 0) = {re_[0](k), im_[0](k)};
  S(0, 1) = S(1, 0) = {re_[1](k), im_[1](k)};
  S(1, 1) = {re_[2](k), im_[2](k)};
  return S;
}

double unitarity_defect(const Mat2c& s) {
  return (s * s.adjoint() - Mat2c::Identity()).cwiseAbs().maxCoeff();
}

EigenphaseDecomposition eigenphase_mix(const Mat2c& s) {
  const double defect = std::max(unitarity_defect(s), std::abs(s(0, 1) - s(1, 0)));
  if (defect > 1e-6)
    throw VerificationError("eigenphase_mix: S not unitary/symmetric (defect " +
                            std::to_string(defect) + ")");
  const cplx w = s(0, 0) - s(1, 1);
  const cplx z = s(0, 1) + s(1, 0);
  EigenphaseDecomposition e;
  double mix = 0;
  if (std::max(std::abs(w), std::abs(z)) > 1e-14) {
    const double phi = std::arg(std::abs(w) >= std::abs(z) ? w : z);
    const cplx rot = std::exp(-I * phi);
    mix = 0.5 * std::atan2((z * rot).real(), (w * rot).real());
  }
  if (mix > kPi / 4) mix -= kPi / 2;
  if (mix <= -kPi / 4) mix += kPi / 2;
  const cplx d = w * std::cos(2 * mix) + z * std::sin(2 * mix);
  const cplx tr = s(0, 0) + s(1, 1);
  e.mix = mix;
  e.delta1 = std::arg(0.5 * (tr + d)) / 2;
  e.delta2 = std::arg(0.5 * (tr - d)) / 2;
  return e;
}

Mat2c recompose(const EigenphaseDecomposition& e) {
  Mat2 O;
  O << std::cos(e.mix), -std::sin(e.mix), std::sin(e.mix), std::cos(e.mix);
  Mat2c D = Mat2c::Zero();
  D(0, 0) = std::exp(2.0 * I * e.delta1);
  D(1, 1) = std::exp(2.0 * I * e.delta2);
  return O.cast<cplx>() * D * O.transpose().cast<cplx>();
}

namespace {
double shift_near(double v, double ref, double period) {
  return v + period * std::round((ref - v) / period);
}
}  // namespace

std::vector<EigenphaseDecomposition> eigenphase_sweep(const std::vector<Mat2c>& s) {
  std::vector<EigenphaseDecomposition> out;
  out.reserve(s.size());
  for (const auto& m : s) {
    EigenphaseDecomposition e = eigenphase_mix(m);
    if (!out.empty()) {
      const auto& p = out.back();
      EigenphaseDecomposition a = e, b{e.delta2, e.delta1, e.mix + kPi / 2};
      double best = 1e300;
      for (auto c : {a, b}) {
        c.delta1 = shift_near(c.delta1, p.delta1, kPi);
        c.delta2 = shift_near(c.delta2, p.delta2, kPi);
        c.mix = shift_near(c.mix, p.mix, kPi);
        const double dist = std::abs(c.delta1 - p.delta1) + std::abs(c.delta2 - p.delta2) +
                            std::abs(c.mix - p.mix);
        if (dist < best) {
          best = dist;
          e = c;
        }
      }
    }
    out.push_back(e);
  }
  return out;
}

PhaseCurve phase_curve(const std::function<Mat2c(double)>& S, const std::vector<double>& k,
                       double delta) {
  PhaseCurve c;
  c.k = k;
  c.e.resize(k.size());
  const double nan = std::nan("");
  std::vector<Mat2c> open;
  std::size_t first_open = k.size();
  double prev = 0;
  bool have_prev = false;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const Mat2c s = S(k[i]);
    if (k[i] * k[i] > delta) {
      if (first_open == k.size()) first_open = i;
      open.push_back(s);
      continue;
    }
    double d1 = std::arg(s(0, 0)) / 2;
    if (have_prev) d1 = shift_near(d1, prev, kPi);
    prev = d1;
    have_prev = true;
    c.e[i] = {d1, nan, nan};
  }
  const auto sweep = eigenphase_sweep(open);
  for (std::size_t j = 0; j < sweep.size(); ++j) c.e[first_open + j] = sweep[j];
  return c;
}

namespace {
double wrap_pi(double d) { return std::abs(d - kPi * std::round(d / kPi)); }
}  // namespace

PhaseDeviation phase_deviation(const PhaseCurve& a, const PhaseCurve& b,
                               const std::function<bool(double)>& use) {
  if (a.k.size() != b.k.size()) throw InputError("phase_deviation: grids differ");
  PhaseDeviation d;
  for (std::size_t i = 0; i < a.k.size(); ++i) {
    if (!use(a.k[i])) continue;
    const auto& x = a.e[i];
    const auto& y = b.e[i];
    const double d1 = wrap_pi(x.delta1 - y.delta1);
    d.delta1 = std::max(d.delta1, d1);
    double eig = d1;
    if (!std::isnan(x.delta2) && !std::isnan(y.delta2)) {
      const double same = std::max(d1, wrap_pi(x.delta2 - y.delta2));
      const double swap = std::max(wrap_pi(x.delta1 - y.delta2), wrap_pi(x.delta2 - y.delta1));
      eig = std::min(same, swap);
      const double m = same <= swap ? wrap_pi(x.mix - y.mix) : wrap_pi(x.mix - y.mix - kPi / 2);
      d.mix = std::max(d.mix, std::min(m, kPi / 2 - m));
    }
    if (eig > d.eigenphase) {
      d.eigenphase = eig;
      d.at_k = a.k[i];
    }
  }
  return d;
}

std::vector<double> k_grid(double lo, double hi, int points, double delta, double gap) {
  std::vector<double> k;
  const double sd = std::sqrt(delta);
  for (int i = 0; i < points; ++i) {
    const double v = lo + (hi - lo) * i / (points - 1);
    if (std::abs(v - sd) < gap) continue;
    k.push_back(v);
  }
  return k;
}

}  // namespace jminv
