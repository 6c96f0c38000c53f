#pragma once

#include <functional>
#include <map>
#include <vector>

#include "jminv/forward.hpp"
#include "jminv/refmodel.hpp"

namespace jminv {

/// f_n(k), n = 0..n_max, for S-matrix S at real k (closed channel 2 allowed).
std::vector<Mat2c> asymptotic_coefficients(const ChannelSet& cs, double k, const Mat2c& S,
                                           int n_max);

/// Diagonal f_n for a bound state at k = i kappa.
std::vector<Mat2c> bound_coefficients(const ChannelSet& cs, double kappa, int n_max);

/// Bound-state weight matrix built from the ANCs.
Mat2 bound_weight(const BoundStateData& b);

enum class Region { Closed, Open, Tail };

struct QuadNode {
  double k, w;
  Region region;
};

struct QuadratureOptions {
  int nodes = 64;   ///< Gauss points per panel
  int panels = 8;   ///< panels per region
};

/// Nodes on [0, k_cut]; square-root maps at k = 0 and at the channel-2 threshold.
std::vector<QuadNode> kernel_nodes(const ChannelSet& cs, double k0, const QuadratureOptions& q);

/// Upper quadrature limit: Gaussian tail of the sine-like solutions below 1e-12.
double kernel_cutoff(const ChannelSet& cs, double k0);

/// Below-threshold S12 used inside the kernel; empty means zero.
using ClosedCouplingPolicy = std::function<cplx(double k)>;

struct MarchenkoKernel {
  int n_max = 0;
  std::vector<Mat2> blocks;  ///< (n_max+1)^2 blocks, row-major in (n, m)

  const Mat2& q(int n, int m) const { return blocks[n * (n_max + 1) + m]; }
  Mat2& q(int n, int m) { return blocks[n * (n_max + 1) + m]; }
  double asymmetry() const;
};

struct KernelInputs {
  const SMatrixProvider* provider = nullptr;
  ChannelSet cs;
  double k0 = 0;
  std::vector<BoundStateData> bound;
  ClosedCouplingPolicy closed_s12;
  QuadratureOptions quad;
  bool include_closed = true;  ///< false drops the below-threshold integral (diagnostics)
  bool include_open = true;
};

MarchenkoKernel kernel_assemble(const KernelInputs& in, int n_max);

/// Assemble at the requested rule and at doubled node count; throws ConvergenceError
/// if any entry moves by more than tol. Returns the doubled-rule kernel.
MarchenkoKernel kernel_assemble_checked(const KernelInputs& in, int n_max, double tol = 1e-8,
                                        double* change = nullptr);

/// Solution of the Marchenko system at level n.
struct KernelSolution {
  int n = 0;
  Mat2 K = Mat2::Identity();  ///< K_nn, upper triangular
  std::map<int, Mat2> M;      ///< M_nm, m > n
  std::map<int, Mat2> Koff;   ///< K_nm = K_nn M_nm

  Mat2 k_at(int m) const;
};

KernelSolution solve_kernel(const MarchenkoKernel& q, int n, int N);

/// (a1, a2, u) of the last row from the level N-2 solution.
Eigen::Vector3d last_row_targets(const KernelSolution& level, const ChannelSet& cs);

struct BandRow {
  double a1 = 0, b1 = 0, a2 = 0, b2 = 0, u = 0, v = 0;
};

/// Band elements of row n from the solutions at levels n-1 (unused for n = 0) and n.
BandRow recover_band(const KernelSolution* prev, const KernelSolution& cur, const ChannelSet& cs);

/// All rows by solving every level.
QuasiTridiagonalHamiltonian full_marchenko_h(const MarchenkoKernel& q, const ChannelSet& cs);

}  // namespace jminv
