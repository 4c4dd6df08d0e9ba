#include "rgcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rgcn/rng.hpp"
#include "rgcn/spectral.hpp"
#include "rgcn/text_io.hpp"

namespace rgcn {

GraphSeeds GraphSeeds::from(std::uint64_t seed) {
  return {derive_seed(seed, 0x1a7e), derive_seed(seed, 0xed9e)};
}

Vector SampledGraph::degrees() const {
  Vector deg = Vector::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [i, j] : edges) {
    deg[i] += 1.0;
    deg[j] += 1.0;
  }
  return deg;
}

namespace {

SparseMatrix adjacency_from_edges(std::size_t n,
                                  const std::vector<std::pair<std::int64_t, std::int64_t>>& edges) {
  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  triplets.reserve(2 * edges.size());
  for (const auto& [i, j] : edges) {
    triplets.emplace_back(i, j, 1.0);
    triplets.emplace_back(j, i, 1.0);
  }
  SparseMatrix a(static_cast<std::int64_t>(n), static_cast<std::int64_t>(n));
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

}  // namespace

SampledGraph sample_graph_on_latents(const RandomGraphModel& model, PointMatrix latents,
                                     double alpha_n, std::uint64_t edge_seed,
                                     std::span<const std::uint64_t> node_keys) {
  const auto n = static_cast<std::size_t>(latents.rows());
  if (!(alpha_n > 0.0) || alpha_n > 1.0) throw ModelError("alpha_n must lie in (0, 1]");
  if (!node_keys.empty() && node_keys.size() != n) {
    throw ShapeError("node_keys must have one key per node");
  }
  const PointMatrix warped = model.kernel.warp(latents);
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  std::vector<double> row(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto begin = static_cast<Eigen::Index>(i + 1);
    model.kernel.row_warped(row_view(warped, static_cast<Eigen::Index>(i)), warped, row, begin);
    const std::uint64_t key_i = node_keys.empty() ? i : node_keys[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = alpha_n * row[j - i - 1];
      if (p > 1.0 + 1e-15 || p < 0.0) {
        std::ostringstream os;
        os << "edge probability alpha_n * W = " << p << " outside [0, 1] for pair (" << i << ", "
           << j << ")";
        throw ModelError(os.str());
      }
      if (p <= 0.0) continue;
      const std::uint64_t key_j = node_keys.empty() ? j : node_keys[j];
      if (pair_uniform(edge_seed, key_i, key_j) < p) {
        edges.emplace_back(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j));
      }
    }
  }
  SampledGraph g;
  g.n = n;
  g.adjacency = adjacency_from_edges(n, edges);
  g.edges = std::move(edges);
  g.signals = model.signal.evaluate(latents);
  g.latents = std::move(latents);
  g.alpha_n = alpha_n;
  g.seeds.edges = edge_seed;
  return g;
}

SampledGraph sample_graph(const RandomGraphModel& model, std::size_t n, GraphSeeds seeds) {
  if (n < 2) throw ConfigError("sample_graph: n must be >= 2");
  const double alpha = model.sparsity.at(n);
  if (alpha * model.kernel.constants().c_max > 1.0 + 1e-15) {
    throw ModelError("sample_graph: alpha_n * c_max exceeds 1");
  }
  SampledGraph g =
      sample_graph_on_latents(model, sample_latents(model, n, seeds.latents), alpha, seeds.edges);
  g.seeds = seeds;
  return g;
}

SampledGraph sample_graph(const RandomGraphModel& model, std::size_t n, std::uint64_t seed) {
  return sample_graph(model, n, GraphSeeds::from(seed));
}

SampledGraph graph_from_edges(std::size_t n,
                              std::vector<std::pair<std::int64_t, std::int64_t>> edges) {
  for (auto& [i, j] : edges) {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n) {
      throw ShapeError("edge endpoint out of range");
    }
    if (i == j) throw ShapeError("self-loops are not allowed");
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  SampledGraph g;
  g.n = n;
  g.adjacency = adjacency_from_edges(n, edges);
  g.edges = std::move(edges);
  g.latents = PointMatrix(static_cast<Eigen::Index>(n), 0);
  g.signals = Matrix(static_cast<Eigen::Index>(n), 0);
  return g;
}

// ---------------------------------------------------------------------------

NormalizedLaplacian::NormalizedLaplacian(const SparseMatrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw ShapeError("adjacency must be square");
  const Eigen::Index n = adjacency.rows();
  degrees_ = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it) degrees_[i] += it.value();
  }
  zero_degree_.assign(static_cast<std::size_t>(n), false);
  Vector inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (degrees_[i] > 0.0) {
      inv_sqrt[i] = 1.0 / std::sqrt(degrees_[i]);
    } else {
      inv_sqrt[i] = 0.0;
      zero_degree_[static_cast<std::size_t>(i)] = true;
    }
  }
  matrix_ = adjacency;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(matrix_, i); it; ++it) {
      it.valueRef() *= inv_sqrt[i] * inv_sqrt[it.col()];
    }
  }
  matrix_.makeCompressed();
}

std::size_t NormalizedLaplacian::isolated_count() const {
  return static_cast<std::size_t>(std::count(zero_degree_.begin(), zero_degree_.end(), true));
}

Matrix NormalizedLaplacian::matvec(const Matrix& v) const {
  if (v.rows() != size()) {
    throw ShapeError("laplacian matvec: operand has " + std::to_string(v.rows()) +
                     " rows, expected " + std::to_string(size()));
  }
  return matrix_ * v;
}

Vector NormalizedLaplacian::matvec(const Vector& v) const {
  if (v.size() != size()) throw ShapeError("laplacian matvec: vector length mismatch");
  return matrix_ * v;
}

Matrix NormalizedLaplacian::dense() const {
  if (size() > kDenseMirrorCap) throw CapacityError("dense mirror only for n <= 512");
  return Matrix(matrix_);
}

double NormalizedLaplacian::spectral_radius() const {
  return power_iteration_norm([this](const Vector& v) { return matvec(v); }, size());
}

NormalizedLaplacian build_laplacian(const SampledGraph& graph) {
  return NormalizedLaplacian(graph.adjacency);
}

Matrix normalized_laplacian_dense(const Matrix& weights) {
  if (weights.rows() != weights.cols()) throw ShapeError("weight matrix must be square");
  const Vector deg = weights.rowwise().sum();
  Vector inv_sqrt = deg.unaryExpr([](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; });
  return inv_sqrt.asDiagonal() * weights * inv_sqrt.asDiagonal();
}

Matrix laplacian_matvec(const NormalizedLaplacian& laplacian, const Matrix& v) {
  return laplacian.matvec(v);
}

Vector degree_input_signal(const SampledGraph& graph, double alpha_n) {
  if (!(alpha_n > 0.0)) throw ConfigError("degree_input_signal: alpha_n must be positive");
  return graph.degrees() / (alpha_n * static_cast<double>(graph.n));
}

// ---------------------------------------------------------------------------
// Text formats

void write_edge_list(const SampledGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << graph.n << ' ' << graph.edges.size() << '\n';
  for (const auto& [i, j] : graph.edges) out << i << ' ' << j << '\n';
}

void write_node_table(const SampledGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const Eigen::Index d = graph.latents.cols();
  const Eigen::Index dz = graph.signals.cols();
  std::string sep;
  for (Eigen::Index k = 0; k < d; ++k, sep = ",") out << sep << 'x' << k;
  for (Eigen::Index k = 0; k < dz; ++k, sep = ",") out << sep << 'z' << k;
  out << '\n';
  for (std::size_t i = 0; i < graph.n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    sep.clear();
    for (Eigen::Index k = 0; k < d; ++k, sep = ",") out << sep << format_double(graph.latents(r, k));
    for (Eigen::Index k = 0; k < dz; ++k, sep = ",") out << sep << format_double(graph.signals(r, k));
    out << '\n';
  }
}

SampledGraph read_graph(const std::filesystem::path& edge_path,
                        const std::optional<std::filesystem::path>& node_path) {
  std::ifstream in(edge_path);
  if (!in) throw ConfigError("cannot read " + edge_path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(edge_path.string() + ": missing header");
  const auto header = split_whitespace(line);
  if (header.size() != 2) throw ConfigError(edge_path.string() + ": header must be 'n m'");
  const auto n = static_cast<std::size_t>(parse_integer(header[0]));
  const auto m = static_cast<std::size_t>(parse_integer(header[1]));
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  edges.reserve(m);
  while (std::getline(in, line)) {
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) throw ConfigError(edge_path.string() + ": bad edge line '" + line + "'");
    edges.emplace_back(parse_integer(fields[0]), parse_integer(fields[1]));
  }
  if (edges.size() != m) throw ConfigError(edge_path.string() + ": edge count differs from header");
  SampledGraph g = graph_from_edges(n, std::move(edges));
  if (!node_path) return g;

  std::ifstream nodes(*node_path);
  if (!nodes) throw ConfigError("cannot read " + node_path->string());
  if (!std::getline(nodes, line)) throw ConfigError(node_path->string() + ": missing header");
  const auto columns = split(line, ',');
  Eigen::Index d = 0;
  Eigen::Index dz = 0;
  for (const auto& c : columns) {
    if (!c.empty() && c[0] == 'x') ++d;
    else if (!c.empty() && c[0] == 'z') ++dz;
    else throw ConfigError(node_path->string() + ": unknown column '" + c + "'");
  }
  g.latents = PointMatrix(static_cast<Eigen::Index>(n), d);
  g.signals = Matrix(static_cast<Eigen::Index>(n), dz);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(nodes, line)) throw ConfigError(node_path->string() + ": too few rows");
    const auto fields = split(line, ',');
    if (static_cast<Eigen::Index>(fields.size()) != d + dz) {
      throw ConfigError(node_path->string() + ": wrong field count on row " + std::to_string(i));
    }
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index k = 0; k < d; ++k) g.latents(r, k) = parse_double(fields[k]);
    for (Eigen::Index k = 0; k < dz; ++k) g.signals(r, k) = parse_double(fields[d + k]);
  }
  return g;
}

}  // namespace rgcn
