#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "rgcn/common.hpp"
#include "rgcn/model.hpp"

namespace rgcn {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

/// Independent counter-based streams for latent positions and for edges.
struct GraphSeeds {
  std::uint64_t latents = 0;
  std::uint64_t edges = 0;

  /// Both streams derived from one seed.
  static GraphSeeds from(std::uint64_t seed);
};

struct SampledGraph {
  std::size_t n = 0;
  /// Unordered edges (i < j), sorted.
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  /// Symmetric 0/1 adjacency, zero diagonal.
  SparseMatrix adjacency;
  PointMatrix latents;
  /// n x d_z node signals Z.
  Matrix signals;
  double alpha_n = 1.0;
  GraphSeeds seeds;

  std::size_t edge_count() const { return edges.size(); }
  Vector degrees() const;
};

SampledGraph sample_graph(const RandomGraphModel& model, std::size_t n, GraphSeeds seeds);
SampledGraph sample_graph(const RandomGraphModel& model, std::size_t n, std::uint64_t seed);

/// Edges and signals on given latent positions. `node_keys` (default: indices) key
/// the per-pair Bernoulli draws, so relabelled latents with relabelled keys give the
/// relabelled graph exactly.
SampledGraph sample_graph_on_latents(const RandomGraphModel& model, PointMatrix latents,
                                     double alpha_n, std::uint64_t edge_seed,
                                     std::span<const std::uint64_t> node_keys = {});

/// Builds a graph from an explicit edge list (no latents unless given).
SampledGraph graph_from_edges(std::size_t n,
                              std::vector<std::pair<std::int64_t, std::int64_t>> edges);

/// L = D^{-1/2} A D^{-1/2}, with (D^{-1/2})_i = 0 at zero-degree nodes.
class NormalizedLaplacian {
 public:
  static constexpr Eigen::Index kDenseMirrorCap = 512;

  explicit NormalizedLaplacian(const SparseMatrix& adjacency);

  Eigen::Index size() const { return matrix_.rows(); }
  const SparseMatrix& matrix() const { return matrix_; }
  const Vector& degree_vector() const { return degrees_; }
  const std::vector<bool>& zero_degree_mask() const { return zero_degree_; }
  std::size_t isolated_count() const;

  /// Exact sparse product; throws ShapeError on a row-count mismatch.
  Matrix matvec(const Matrix& v) const;
  Vector matvec(const Vector& v) const;

  /// Dense copy, only for n <= kDenseMirrorCap (oracle tests).
  Matrix dense() const;

  /// Power-iteration estimate of the spectral radius.
  double spectral_radius() const;

 private:
  SparseMatrix matrix_;
  Vector degrees_;
  std::vector<bool> zero_degree_;
};

NormalizedLaplacian build_laplacian(const SampledGraph& graph);
/// Normalized Laplacian of a dense symmetric weight matrix, same zero-degree convention.
Matrix normalized_laplacian_dense(const Matrix& weights);

Matrix laplacian_matvec(const NormalizedLaplacian& laplacian, const Matrix& v);

/// Z = A 1 / (alpha_n n).
Vector degree_input_signal(const SampledGraph& graph, double alpha_n);

/// Plain-text edge list: header "n m", then "i j" per line (0-indexed, i < j).
void write_edge_list(const SampledGraph& graph, const std::filesystem::path& path);
/// CSV with columns x0..x{d-1}, z0..z{dz-1}; 17 significant digits.
void write_node_table(const SampledGraph& graph, const std::filesystem::path& path);
/// Reads an edge list and, when given, the companion node table.
SampledGraph read_graph(const std::filesystem::path& edge_path,
                        const std::optional<std::filesystem::path>& node_path = std::nullopt);

}  // namespace rgcn
