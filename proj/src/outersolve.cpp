#include "jminv/outersolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jminv {

namespace {

double min_lambda(const std::vector<SpectralTriplet>& tr) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : tr) m = std::min(m, t.lambda);
  return m;
}

void sort_by_lambda(std::vector<SpectralTriplet>& tr) {
  std::sort(tr.begin(), tr.end(),
            [](const SpectralTriplet& a, const SpectralTriplet& b) { return a.lambda < b.lambda; });
}

}  // namespace

ConstraintSystem make_constraint_system(const ChannelSet& cs, double k0,
                                        std::vector<SpectralTriplet> known,
                                        const Eigen::Vector3d& targets,
                                        std::vector<BoundStateData> bound) {
  ConstraintSystem sys;
  sys.cs = cs;
  sys.k0 = k0;
  sys.known = std::move(known);
  sys.targets = targets;
  sys.bound = std::move(bound);
  for (const auto& b : sys.bound) {
    const double d = std::abs(eval_imaginary_axis(sys.known, cs, b.kappa).dplus);
    sys.dplus_scale.push_back(d > 0 ? d : 1.0);
  }
  return sys;
}

std::vector<SpectralTriplet> assemble_triplets(const ConstraintSystem& sys, const Eigen::VectorXd& x) {
  std::vector<SpectralTriplet> tr = sys.known;
  for (int j = 0; j < sys.unknown_triplets(); ++j) tr.push_back({x[3 * j], x[3 * j + 1], x[3 * j + 2]});
  return tr;
}

Eigen::VectorXd constraint_residuals(const ConstraintSystem& sys, const Eigen::VectorXd& x) {
  if (x.size() != sys.size()) throw InputError("constraint_residuals: wrong unknown count");
  const auto tr = assemble_triplets(sys, x);
  Eigen::VectorXd F(sys.size());
  double s11 = 0, s22 = 0, s12 = 0, m11 = 0, m22 = 0, m12 = 0;
  for (const auto& t : tr) {
    s11 += t.zN * t.zN;
    s22 += t.zNN * t.zNN;
    s12 += t.zN * t.zNN;
    m11 += t.lambda * t.zN * t.zN;
    m22 += t.lambda * t.zNN * t.zNN;
    m12 += t.lambda * t.zN * t.zNN;
  }
  F << s11 - 1, s22 - 1, s12, m11 - sys.targets[0], m22 - sys.targets[1], m12 - sys.targets[2],
      Eigen::VectorXd::Zero(sys.size() - 6);
  for (std::size_t nu = 0; nu < sys.bound.size(); ++nu) {
    const BoundStateData& b = sys.bound[nu];
    const auto e = eval_imaginary_axis(tr, sys.cs, b.kappa);
    const auto [r11, r12] = residues_at(tr, sys.cs, b.kappa);
    const cplx I(0, 1);
    const double d11 = (I * b.res11).real(), d12 = (I * b.res12).real();
    const double sc12 = std::max(std::abs(d12), 1e-3 * std::abs(d11));
    F[6 + 3 * nu] = e.dplus / sys.dplus_scale[nu];
    F[7 + 3 * nu] = ((I * r11).real() - d11) / std::abs(d11);
    F[8 + 3 * nu] = ((I * r12).real() - d12) / sc12;
  }
  return F;
}

bool admissible(const ConstraintSystem& sys, const Eigen::VectorXd& x) {
  const double lo = min_lambda(sys.known), top = eps_of_k(sys.cs, sys.k0);
  const int nb = static_cast<int>(sys.bound.size());
  for (int j = 0; j < nb; ++j)
    if (!(x[3 * j] < lo)) return false;
  for (int j = nb; j < nb + 2; ++j)
    if (!(x[3 * j] > top)) return false;
  return x.allFinite();
}

namespace {

// residuals that return NaN instead of throwing on pole coincidences
Eigen::VectorXd safe_residuals(const ConstraintSystem& sys, const Eigen::VectorXd& x) {
  try {
    return constraint_residuals(sys, x);
  } catch (const InputError&) {
    return Eigen::VectorXd::Constant(sys.size(), std::numeric_limits<double>::quiet_NaN());
  }
}

}  // namespace

Eigen::VectorXd staged_guess(const ConstraintSystem& sys) {
  const int nb = static_cast<int>(sys.bound.size());
  const double top = eps_of_k(sys.cs, sys.k0);
  double d11 = 1, d22 = 1, d12 = 0;
  for (const auto& t : sys.known) {
    d11 -= t.zN * t.zN;
    d22 -= t.zNN * t.zNN;
    d12 -= t.zN * t.zNN;
  }
  const double r11 = std::sqrt(std::max(d11, 1e-12)), r22 = std::sqrt(std::max(d22, 1e-12));
  Eigen::VectorXd x(sys.size());
  for (int j = 0; j < nb; ++j) {
    const double eb = -0.5 * std::pow(sys.cs.rho * sys.bound[j].kappa, 2);
    x.segment<3>(3 * j) << eb - 1e-3, 0, 0;
  }
  x.tail<6>() << top + 0.5, r11, d12 / (2 * r11), top + 1.5, d12 / (2 * r22), -r22;

  // externals only, bound triplets at zero weight
  auto F6 = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd xx = x;
    xx.tail<6>() = y;
    return Eigen::VectorXd(safe_residuals(sys, xx).head<6>());
  };
  auto ok6 = [&](const Eigen::VectorXd& y) { return y[0] > top && y[3] > top && y.allFinite(); };
  const NewtonResult s1 = damped_newton(F6, x.tail<6>(), ok6);
  x.tail<6>() = s1.x;
  if (nb == 0) return x;

  const double lo = min_lambda(sys.known);
  for (int j = 0; j < nb; ++j) x[3 * j + 1] = 0.01;
  auto Fb = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd xx = x;
    xx.head(3 * nb) = z;
    return Eigen::VectorXd(safe_residuals(sys, xx).tail(3 * nb));
  };
  auto okb = [&](const Eigen::VectorXd& z) {
    for (int j = 0; j < nb; ++j)
      if (!(z[3 * j] < lo)) return false;
    return z.allFinite();
  };
  const NewtonResult s2 = damped_newton(Fb, x.head(3 * nb), okb);
  x.head(3 * nb) = s2.x;
  return x;
}

NewtonResult solve_external(const ConstraintSystem& sys, const Eigen::VectorXd& guess,
                            const NewtonOptions& opt) {
  return damped_newton([&](const Eigen::VectorXd& x) { return safe_residuals(sys, x); }, guess,
                       [&](const Eigen::VectorXd& x) { return admissible(sys, x); }, opt);
}

MarchenkoKernel reconstruction_kernel(const SMatrixProvider& provider, const ChannelSet& cs,
                                      double k0, const std::vector<BoundStateData>& bound,
                                      const ClosedCouplingPolicy& s12, const QuadratureOptions& q) {
  KernelInputs in;
  in.provider = &provider;
  in.cs = cs;
  in.k0 = k0;
  in.bound = bound;
  in.closed_s12 = s12;
  in.quad = q;
  return kernel_assemble(in, 2 * cs.N - 2);
}

IterationResult iterate_closed_channel(const SMatrixProvider& provider, const ChannelSet& cs,
                                       double k0, const IterationOptions& opt) {
  cs.validate();
  IterationResult res;
  res.closed = find_closed_triplets(provider, cs, opt.scan);
  res.open = find_open_triplets(provider, cs, k0, opt.scan);
  res.bound = provider.bound_states();
  for (const auto* ex : {&res.closed, &res.open})
    for (const auto& w : ex->warnings) res.warnings.push_back(w);

  std::vector<SpectralTriplet> known = res.closed.triplets;
  known.insert(known.end(), res.open.triplets.begin(), res.open.triplets.end());
  const int missing = 2 * cs.N - static_cast<int>(known.size());
  const int expected = static_cast<int>(res.bound.size()) + 2;
  if (missing != expected)
    throw InputError("triplet count mismatch: found " + std::to_string(known.size()) +
                     " triplets below eps(k0), need 2N - " + std::to_string(expected) + " = " +
                     std::to_string(2 * cs.N - expected));

  Eigen::VectorXd x;
  std::vector<SpectralTriplet> prev_tr;
  for (int i = 0; i <= opt.max_iter; ++i) {
    ClosedCouplingPolicy s12;
    if (i > 0) {
      s12 = [&cs, tr = prev_tr](double k) { return smatrix_from_triplets(tr, cs, k).S(0, 1); };
    }
    IterationRecord rec;
    rec.index = i;
    KernelInputs in;
    in.provider = &provider;
    in.cs = cs;
    in.k0 = k0;
    in.bound = res.bound;
    in.closed_s12 = s12;
    in.quad = opt.quad;
    const MarchenkoKernel Q = opt.check_quadrature
                                  ? kernel_assemble_checked(in, 2 * cs.N - 2, 1e-8, &rec.quadrature_change)
                                  : kernel_assemble(in, 2 * cs.N - 2);
    rec.targets = last_row_targets(solve_kernel(Q, cs.N - 2, cs.N), cs);

    const ConstraintSystem sys = make_constraint_system(cs, k0, known, rec.targets, res.bound);
    const Eigen::VectorXd guess = i == 0 ? staged_guess(sys) : x;
    rec.newton = solve_external(sys, guess);
    if (!rec.newton.converged)
      throw ConvergenceError("constraint solve did not converge at iteration " + std::to_string(i) +
                             " (residual " + std::to_string(rec.newton.residual) + ")");
    x = rec.newton.x;
    rec.unknowns = x;
    rec.triplets = assemble_triplets(sys, x);
    sort_by_lambda(rec.triplets);
    rec.h = lanczos_reconstruct(rec.triplets, cs);
    prev_tr = rec.triplets;
    res.history.push_back(rec);

    const int m = static_cast<int>(res.history.size());
    if (m >= 2) {
      const double change =
          (res.history[m - 1].targets - res.history[m - 2].targets).cwiseAbs().maxCoeff();
      if (change < opt.tol) {
        res.converged = true;
        break;
      }
    }
    if (m >= 6) {
      bool monotone = true;
      for (int j = m - 4; j < m; ++j) {
        const double d0 = std::abs(res.history[j - 1].targets[2] - res.history[j - 2].targets[2]);
        const double d1 = std::abs(res.history[j].targets[2] - res.history[j - 1].targets[2]);
        if (d1 > d0) monotone = false;
      }
      if (!monotone) res.warnings.push_back("non-monotone coupling changes at iteration " + std::to_string(i));
    }
  }
  return res;
}

}  // namespace jminv
