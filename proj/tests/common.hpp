#pragma once

#include <random>

#include "golden_tables.hpp"
#include "jminv/io.hpp"

namespace fixture {

inline jminv::ChannelSet channels() { return {0, 0, 10.0, 0.495, 5}; }
inline jminv::AnalyticModelParams model() { return {-2.0, 0.6, 3.0, 10.0}; }
inline double k0() { return 6.0; }

template <std::size_t R>
jminv::QuasiTridiagonalHamiltonian from_bands(const std::array<std::array<double, 6>, R>& t) {
  auto h = jminv::QuasiTridiagonalHamiltonian::zeros(channels());
  for (int n = 0; n < static_cast<int>(R); ++n) {
    h.a1[n] = t[n][0];
    h.b1[n] = t[n][1];
    h.a2[n] = t[n][2];
    h.b2[n] = t[n][3];
    h.u[n] = t[n][4];
    h.v[n] = t[n][5];
  }
  return h;
}

inline std::vector<jminv::SpectralTriplet> final_triplets() {
  std::vector<jminv::SpectralTriplet> tr;
  for (const auto& t : golden::triplets_first) tr.push_back({t.lambda, t.zN, t.zNN});
  tr[0] = {golden::triplets_final_changed[0].lambda, golden::triplets_final_changed[0].zN,
           golden::triplets_final_changed[0].zNN};
  for (int j = 1; j < 3; ++j)
    tr[7 + j] = {golden::triplets_final_changed[j].lambda, golden::triplets_final_changed[j].zN,
                 golden::triplets_final_changed[j].zNN};
  return tr;
}

/// One shared reconstruction of the model problem (expensive parts cached).
inline const jminv::IterationResult& model_run() {
  static const jminv::IterationResult r = [] {
    jminv::AnalyticModel m(model(), channels());
    return jminv::iterate_closed_channel(m, channels(), k0());
  }();
  return r;
}

inline double max_band_diff(const jminv::QuasiTridiagonalHamiltonian& a,
                            const jminv::QuasiTridiagonalHamiltonian& b) {
  return (jminv::dense(a) - jminv::dense(b)).cwiseAbs().maxCoeff();
}

}  // namespace fixture
