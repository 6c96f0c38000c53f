#pragma once

#include <random>
#include <vector>

#include "jminv/channels.hpp"
#include "jminv/refmodel.hpp"
#include "jminv/types.hpp"

namespace jminv {

/// Symmetric 2N x 2N matrix with tridiagonal channel blocks and a two-band
/// coupling block. b1[0], b2[0], v[0] are unused and kept at zero; b1[n]
/// couples rows n-1 and n, v[n] couples channel-1 row n with channel-2 row n-1.
struct QuasiTridiagonalHamiltonian {
  ChannelSet cs;
  Eigen::VectorXd a1, b1, a2, b2, u, v;

  static QuasiTridiagonalHamiltonian zeros(const ChannelSet& cs);
  int N() const { return cs.N; }
  void validate() const;
};

/// Kinetic energy plus threshold shift (no interaction).
QuasiTridiagonalHamiltonian free_hamiltonian(const ChannelSet& cs);

/// Random instance with negative b bands (the sign convention of the kinetic matrix).
QuasiTridiagonalHamiltonian random_hamiltonian(const ChannelSet& cs, std::mt19937_64& rng);

Eigen::MatrixXd dense(const QuasiTridiagonalHamiltonian& h);
/// Throws InputError unless `m` is symmetric with the quasi-tridiagonal pattern.
QuasiTridiagonalHamiltonian from_dense(const Eigen::MatrixXd& m, const ChannelSet& cs);

struct SpectralTriplet {
  double lambda = 0;
  double zN = 0;   ///< last channel-1 component of the eigenvector
  double zNN = 0;  ///< last channel-2 component
};

/// Eigenvalues ascending; per-column sign makes the larger of |zN|, |zNN| positive.
std::vector<SpectralTriplet> spectral_data(const QuasiTridiagonalHamiltonian& h);

struct PFunctions {
  double p11 = 0, p12 = 0, p22 = 0;
};

PFunctions p_functions(const std::vector<SpectralTriplet>& tr, double eps);

/// S-matrix from the pole expansion at real k > 0, k != sqrt(delta).
/// Below threshold the channel-2 quantities are the analytic continuation.
struct ForwardEval {
  Mat2c S;
  cplx dplus;
};
ForwardEval smatrix_from_triplets(const std::vector<SpectralTriplet>& tr, const ChannelSet& cs,
                                  double k);
SMatrixSample smatrix_from_h(const QuasiTridiagonalHamiltonian& h, double k);

/// Values on the bound-state axis k = i kappa: D+ and the numerators of S11 and S12.
struct ImaginaryAxisEval {
  double dplus = 0;  ///< real part of D+(i kappa)
  double dplus_imag = 0;
  double num11 = 0, num12 = 0;
};
ImaginaryAxisEval eval_imaginary_axis(const std::vector<SpectralTriplet>& tr, const ChannelSet& cs,
                                      double kappa);

/// Residues of S11, S12 at k = i kappa from the numerators and d/dkappa of D+.
std::pair<cplx, cplx> residues_at(const std::vector<SpectralTriplet>& tr, const ChannelSet& cs,
                                  double kappa);

struct BoundStateScan {
  double kappa_max = 0;  ///< <= 0 selects 10 / rho
  int points = 2000;
};

/// Zeros of D+(i kappa) on (0, kappa_max] with residues and ANCs.
std::vector<BoundStateData> bound_states_from_triplets(const std::vector<SpectralTriplet>& tr,
                                                       const ChannelSet& cs,
                                                       const BoundStateScan& scan = {});
std::vector<BoundStateData> bound_states_from_h(const QuasiTridiagonalHamiltonian& h,
                                                const BoundStateScan& scan = {});

/// Provider backed by a Hamiltonian (forward S on the real axis, bound states from D+).
class HamiltonianProvider final : public SMatrixProvider {
 public:
  explicit HamiltonianProvider(const QuasiTridiagonalHamiltonian& h);
  Mat2c smatrix(double k) const override;
  const std::vector<BoundStateData>& bound_states() const override { return bound_; }

 private:
  ChannelSet cs_;
  std::vector<SpectralTriplet> tr_;
  std::vector<BoundStateData> bound_;
};

}  // namespace jminv
