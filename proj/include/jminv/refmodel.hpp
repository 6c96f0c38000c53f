#pragma once

#include <memory>
#include <vector>

#include "jminv/channels.hpp"
#include "jminv/numerics.hpp"
#include "jminv/types.hpp"

namespace jminv {

struct SMatrixSample {
  double k = 0;
  Mat2c s = Mat2c::Identity();
};

/// Bound state: pole of S at k = i*kappa.
struct BoundStateData {
  double kappa = 0;
  cplx res11, res12;       ///< residues of S11, S12 in k
  Eigen::Vector2d anc;     ///< asymptotic normalization constants (channel 1, 2)
};

/// Fill anc from kappa and the two residues.
BoundStateData make_bound_state(const ChannelSet& cs, double kappa, cplx res11, cplx res12);

/// Source of S-matrix data on the real k axis plus bound states.
class SMatrixProvider {
 public:
  virtual ~SMatrixProvider() = default;
  virtual Mat2c smatrix(double k) const = 0;
  virtual const std::vector<BoundStateData>& bound_states() const = 0;
};

struct AnalyticModelParams {
  double a = -2, b = 0.6, x = 3, delta = 10;
};

/// Closed-form two-channel s-wave model; accepts complex k.
Mat2c model_smatrix(const AnalyticModelParams& p, cplx k);
inline SMatrixSample model_smatrix(const AnalyticModelParams& p, double k) {
  return {k, model_smatrix(p, cplx(k, 0))};
}

/// Residue of each element of S at k0 by trapezoid contour integration
/// on circles of radius 1e-2 and 1e-3, Richardson-combined.
Mat2c contour_residue(const std::function<Mat2c(cplx)>& S, cplx k0);

/// All bound-state poles of the model with kappa in (0, kappa_max].
std::vector<BoundStateData> model_bound_states(const AnalyticModelParams& p, const ChannelSet& cs,
                                               double kappa_max = 50);

/// The single bound state of the model; throws if there is none.
BoundStateData bound_state_of_model(const AnalyticModelParams& p, const ChannelSet& cs,
                                    double kappa_max = 50);

class AnalyticModel final : public SMatrixProvider {
 public:
  AnalyticModel(const AnalyticModelParams& p, const ChannelSet& cs);
  Mat2c smatrix(double k) const override { return model_smatrix(p_, cplx(k, 0)); }
  const std::vector<BoundStateData>& bound_states() const override { return bound_; }
  const AnalyticModelParams& params() const { return p_; }

 private:
  AnalyticModelParams p_;
  std::vector<BoundStateData> bound_;
};

/// Elementwise cubic-spline interpolation of sampled S(k).
class TabulatedProvider final : public SMatrixProvider {
 public:
  TabulatedProvider(std::vector<SMatrixSample> samples, std::vector<BoundStateData> bound);
  Mat2c smatrix(double k) const override;
  const std::vector<BoundStateData>& bound_states() const override { return bound_; }
  double k_min() const { return kmin_; }
  double k_max() const { return kmax_; }

 private:
  std::vector<BoundStateData> bound_;
  std::vector<CubicSpline> re_, im_;  // S11, S12, S22
  double kmin_ = 0, kmax_ = 0;
};

/// Blatt-Biedenharn parameters: S = O(mix) diag(e^{2i d1}, e^{2i d2}) O(mix)^T.
struct EigenphaseDecomposition {
  double delta1 = 0, delta2 = 0, mix = 0;
};

double unitarity_defect(const Mat2c& s);

EigenphaseDecomposition eigenphase_mix(const Mat2c& s);
Mat2c recompose(const EigenphaseDecomposition& e);

/// Decompose a sequence of S matrices ordered in k with continuous branches.
std::vector<EigenphaseDecomposition> eigenphase_sweep(const std::vector<Mat2c>& s);

/// Phase parameters along a k grid. Below the channel-2 threshold only delta1
/// (half the phase of S11) is defined; delta2 and mix are NaN there.
struct PhaseCurve {
  std::vector<double> k;
  std::vector<EigenphaseDecomposition> e;
};
PhaseCurve phase_curve(const std::function<Mat2c(double)>& S, const std::vector<double>& k,
                       double delta);

/// Largest eigenphase difference between two curves on a common grid (mod pi, best
/// channel assignment where both are open), restricted to points passing `use`.
struct PhaseDeviation {
  double delta1 = 0;       ///< same-label delta1 difference
  double eigenphase = 0;   ///< both eigenphases, best assignment
  double mix = 0;
  double at_k = 0;         ///< where the eigenphase maximum occurs
};
PhaseDeviation phase_deviation(const PhaseCurve& a, const PhaseCurve& b,
                               const std::function<bool(double)>& use);

/// Uniform grid on [lo, hi] skipping points within `gap` of sqrt(delta).
std::vector<double> k_grid(double lo, double hi, int points, double delta, double gap = 1e-6);

}  // namespace jminv
