#pragma once

#include <string>
#include <vector>

#include "jminv/marchenko.hpp"
#include "jminv/numerics.hpp"
#include "jminv/spectral_inverse.hpp"

namespace jminv {

/// Unknowns: one triplet per bound state, then two external triplets above eps(k0),
/// stored as (lambda, zN, zNN) consecutively.
struct ConstraintSystem {
  ChannelSet cs;
  double k0 = 0;
  std::vector<SpectralTriplet> known;
  Eigen::Vector3d targets = Eigen::Vector3d::Zero();  ///< a1, a2, u of the last row
  std::vector<BoundStateData> bound;
  std::vector<double> dplus_scale;                    ///< |D+(i kappa)| from known triplets

  int unknown_triplets() const { return static_cast<int>(bound.size()) + 2; }
  int size() const { return 3 * unknown_triplets(); }
};

ConstraintSystem make_constraint_system(const ChannelSet& cs, double k0,
                                        std::vector<SpectralTriplet> known,
                                        const Eigen::Vector3d& targets,
                                        std::vector<BoundStateData> bound);

/// Known triplets followed by the unknowns in x.
std::vector<SpectralTriplet> assemble_triplets(const ConstraintSystem& sys, const Eigen::VectorXd& x);

/// Orthonormality (3), last-row moments (3), then per bound state: D+ (scaled by
/// dplus_scale) and the relative mismatch of i*Res S11 and i*Res S12.
Eigen::VectorXd constraint_residuals(const ConstraintSystem& sys, const Eigen::VectorXd& x);

bool admissible(const ConstraintSystem& sys, const Eigen::VectorXd& x);

/// Staged start: externals with zero-weight bound triplets, then bound triplets alone.
Eigen::VectorXd staged_guess(const ConstraintSystem& sys);

NewtonResult solve_external(const ConstraintSystem& sys, const Eigen::VectorXd& guess,
                            const NewtonOptions& opt = {});

struct IterationOptions {
  int max_iter = 20;
  double tol = 1e-8;
  QuadratureOptions quad;
  ScanOptions scan;
  bool check_quadrature = false;
};

struct IterationRecord {
  int index = 0;
  Eigen::Vector3d targets;
  std::vector<SpectralTriplet> triplets;  ///< complete sorted set
  Eigen::VectorXd unknowns;
  QuasiTridiagonalHamiltonian h;
  NewtonResult newton;
  double quadrature_change = -1;
};

struct IterationResult {
  Extraction closed, open;
  std::vector<BoundStateData> bound;
  std::vector<IterationRecord> history;
  bool converged = false;
  std::vector<std::string> warnings;

  const QuasiTridiagonalHamiltonian& final_h() const { return history.back().h; }
};

/// The full reconstruction: extraction, Marchenko targets, constraint solve, Lanczos,
/// repeated with below-threshold S12 taken from the previous Hamiltonian.
IterationResult iterate_closed_channel(const SMatrixProvider& provider, const ChannelSet& cs,
                                       double k0, const IterationOptions& opt = {});

/// Marchenko kernel on the window needed by the last-row targets.
MarchenkoKernel reconstruction_kernel(const SMatrixProvider& provider, const ChannelSet& cs,
                                      double k0, const std::vector<BoundStateData>& bound,
                                      const ClosedCouplingPolicy& s12, const QuadratureOptions& q);

}  // namespace jminv
