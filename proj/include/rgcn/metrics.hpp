#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rgcn/common.hpp"
#include "rgcn/graph.hpp"
#include "rgcn/model.hpp"

namespace rgcn {

/// C[i][j] = ||u_i - v_j||^2.
Matrix squared_distance_cost(const Matrix& u, const Matrix& v);

/// (n^-1 sum_i ||Z_i - f(x_i)||^2)^(1/2).
double mse_x(const Matrix& z, const Matrix& f_values);

struct AssignmentResult {
  double cost = 0.0;
  /// Column assigned to each row.
  std::vector<std::size_t> assignment;
};

/// Minimum-cost perfect matching on a square cost matrix (shortest augmenting path
/// Hungarian method with potentials, O(n^3)).
AssignmentResult solve_assignment(const Matrix& cost);

struct MseSigmaResult {
  double value = 0.0;
  /// Row i of Z1 is matched to row permutation[i] of Z2.
  std::vector<std::size_t> permutation;
};

inline constexpr std::size_t kExactAssignmentCap = 3000;

/// min over permutations of (n^-1 sum_i ||Z1_i - Z2_sigma(i)||^2)^(1/2).
/// Single-column signals are matched by sorting, at any n; otherwise the assignment
/// solver is used and n above `cap` throws CapacityError.
MseSigmaResult mse_sigma_exact(const Matrix& z1, const Matrix& z2,
                               std::size_t cap = kExactAssignmentCap);

struct SinkhornOptions {
  /// Absolute regularization; when unset, 1e-2 * median cost.
  std::optional<double> epsilon;
  int max_iter = 10000;
  /// L1 violation of the row marginal.
  double tol = 1e-9;
};

struct SinkhornResult {
  /// (sum_ij P_ij C_ij)^(1/2) for the entropic plan P.
  double value = 0.0;
  double epsilon = 0.0;
  int iterations = 0;
  double marginal_error = 0.0;
  /// False when max_iter was reached; value is then the last iterate.
  bool converged = false;
};

/// Log-domain Sinkhorn between uniform empirical measures on the rows of u and v.
SinkhornResult sinkhorn_uniform(const Matrix& u, const Matrix& v, const SinkhornOptions& options = {});

/// Entropic surrogate of mse_sigma for equal node counts.
SinkhornResult mse_sigma_entropic(const Matrix& z1, const Matrix& z2,
                                  const SinkhornOptions& options = {});

struct WassersteinResult {
  double value = 0.0;
  bool exact = true;
};

/// W2 between uniform empirical measures. On the line, exact through quantile functions.
/// Otherwise exact via assignment on the lcm(n, m) replicated clouds while that stays
/// under the assignment cap, Sinkhorn beyond.
WassersteinResult wasserstein2_empirical(const Matrix& points1, const Matrix& points2,
                                         std::size_t cap = kExactAssignmentCap);

inline constexpr std::size_t kDenseKernelCap = 8000;

/// ||L(A) - L(K)|| by power iteration on the difference operator (300 iterations,
/// 1e-10 relative tolerance, three restarts). K is the kernel matrix on the graph's
/// latents: with zero diagonal when use_exact_kernel (the no-self-loop expectation of A
/// up to alpha_n), the literal W(X) including W(x_i, x_i) otherwise.
double laplacian_spectral_distance(const SampledGraph& graph, const RandomGraphModel& model,
                                   bool use_exact_kernel = true);

/// Dense kernel matrix W(X).
Matrix kernel_matrix(const Kernel& kernel, const PointMatrix& latents, bool zero_diagonal);

}  // namespace rgcn
