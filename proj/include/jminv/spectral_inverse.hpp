#pragma once

#include <string>
#include <vector>

#include "jminv/forward.hpp"
#include "jminv/refmodel.hpp"

namespace jminv {

/// Open-region quantities at energy eps: P~_ab = Theta_a / D.
struct PtildeValues {
  cplx D, theta1, theta2, theta3, detS;
};
PtildeValues ptilde_open(const Mat2c& S, const ChannelSet& cs, double eps);

/// Closed region: only S11 enters; P~_1 = theta / D.
struct PtildeClosed {
  cplx D, theta;
};
PtildeClosed ptilde_closed(cplx s11, const ChannelSet& cs, double eps);

struct ScanOptions {
  int points = 2000;
  double xtol = 1e-13;
};

struct Extraction {
  std::vector<SpectralTriplet> triplets;
  std::vector<Eigen::Vector3d> residues;  ///< Res of P~11, P~12, P~22 at each root
  double max_imag = 0;                    ///< max |Im| / max |Re| of the realized D on the grid
  std::vector<std::string> warnings;
};

/// Roots of D on the region where both channels are open, eps in (rho^2 delta/2, rho^2 k0^2/2).
Extraction find_open_triplets(const SMatrixProvider& provider, const ChannelSet& cs, double k0,
                              const ScanOptions& opt = {});

/// Roots of the open-channel D~ below the channel-2 threshold; zNN = 0.
Extraction find_closed_triplets(const SMatrixProvider& provider, const ChannelSet& cs,
                                const ScanOptions& opt = {});

/// min |D| / max |D| of the full two-channel D below threshold (no real roots if bounded away from 0).
double closed_region_full_d_ratio(const SMatrixProvider& provider, const ChannelSet& cs,
                                  int points = 2000);

struct LanczosReport {
  double constraint_violation = 0;  ///< max |W^T W - I|
  bool repaired = false;
};

/// Quasi-tridiagonal H from a complete set of 2N triplets by backward block Lanczos.
QuasiTridiagonalHamiltonian lanczos_reconstruct(const std::vector<SpectralTriplet>& tr,
                                                const ChannelSet& cs,
                                                LanczosReport* report = nullptr);

struct PotentialMatrix {
  ChannelSet cs;
  Eigen::MatrixXd v;  ///< 2N x 2N, channel blocks [[V11, V12], [V21, V22]]
};

PotentialMatrix potential_from_h(const QuasiTridiagonalHamiltonian& h);

/// Coordinate-space kernel V^{ab}(r, r') of the separable potential (hbar*omega = 1).
double potential_kernel(const PotentialMatrix& vm, int alpha, int beta, double r, double r_prime);

}  // namespace jminv
