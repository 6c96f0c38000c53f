#include "jminv/channels.hpp"

#include <cmath>

namespace jminv {

void ChannelSet::validate() const {
  if (!(rho > 0)) throw InputError("channels: rho must be > 0");
  if (N < 2) throw InputError("channels: N must be >= 2");
  if (ell1 < 0 || ell2 < 0) throw InputError("channels: ell must be >= 0");
  if (!(delta >= 0)) throw InputError("channels: delta must be >= 0");
}

cplx channel2_momentum(const ChannelSet& cs, cplx k) {
  if (k.imag() == 0 && k.real() * k.real() >= cs.delta)
    return std::sqrt(k.real() * k.real() - cs.delta);
  return cplx(0, 1) * std::sqrt(cs.delta - k * k);
}

Kinematics kinematics_at(const ChannelSet& cs, double k) {
  if (k < 0) throw InputError("kinematics_at: k must be >= 0");
  Kinematics kin;
  kin.k = k;
  kin.k1 = k;
  kin.k2 = channel2_momentum(cs, k);
  kin.q1 = cs.rho * kin.k1;
  kin.q2 = cs.rho * kin.k2;
  kin.eps = eps_of_k(cs, k);
  return kin;
}

WeightMatrix weight_at(const ChannelSet& cs, double k) {
  if (k < 0) throw InputError("weight_at: k must be >= 0");
  WeightMatrix w;
  if (cs.delta == 0) w.p22 = 1;
  else if (k * k > cs.delta) w.p22 = k / std::sqrt(k * k - cs.delta);
  return w;
}

}  // namespace jminv
