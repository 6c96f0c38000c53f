#pragma once

#include "jminv/types.hpp"

namespace jminv {

/// Two coupled channels; channel 1 has zero threshold.
struct ChannelSet {
  int ell1 = 0, ell2 = 0;
  double delta = 0;  ///< threshold of channel 2 (energy units, hbar = mu = 1)
  double rho = 1.0;
  int N = 2;

  void validate() const;
  int dim() const { return 2 * N; }
  /// Dimensionless energy of the channel-2 threshold.
  double threshold_eps() const { return rho * rho * delta / 2; }
  int ell(int alpha) const { return alpha == 0 ? ell1 : ell2; }
};

struct Kinematics {
  double k = 0;
  cplx k1, k2;
  cplx q1, q2;
  double eps = 0;
};

/// Channel-2 momentum: sqrt(k^2 - delta) above threshold, i sqrt(delta - k^2) otherwise.
cplx channel2_momentum(const ChannelSet& cs, cplx k);

Kinematics kinematics_at(const ChannelSet& cs, double k);

/// Diagonal weight matrix of the completeness relation.
struct WeightMatrix {
  double p11 = 1, p22 = 0;
};

WeightMatrix weight_at(const ChannelSet& cs, double k);

inline double eps_of_k(const ChannelSet& cs, double k) { return 0.5 * cs.rho * cs.rho * k * k; }
inline double k_of_eps(const ChannelSet& cs, double eps) { return std::sqrt(2 * eps) / cs.rho; }

}  // namespace jminv
