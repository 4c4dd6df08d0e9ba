#include "rgcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rgcn/spectral.hpp"

namespace rgcn {

Matrix squared_distance_cost(const Matrix& u, const Matrix& v) {
  if (u.cols() != v.cols()) throw ShapeError("cost matrix: point dimensions differ");
  Matrix c(u.rows(), v.rows());
  for (Eigen::Index j = 0; j < v.rows(); ++j) {
    for (Eigen::Index i = 0; i < u.rows(); ++i) c(i, j) = (u.row(i) - v.row(j)).squaredNorm();
  }
  return c;
}

double mse_x(const Matrix& z, const Matrix& f_values) {
  if (z.rows() != f_values.rows() || z.cols() != f_values.cols()) {
    throw ShapeError("mse_x: shapes differ");
  }
  if (z.rows() == 0) throw ShapeError("mse_x: empty signal");
  return std::sqrt((z - f_values).squaredNorm() / static_cast<double>(z.rows()));
}

AssignmentResult solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw ShapeError("assignment: cost matrix must be square");
  const auto n = static_cast<std::size_t>(cost.rows());
  AssignmentResult result;
  if (n == 0) return result;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual source of each augmentation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_to(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::fill(min_to.begin(), min_to.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t r = match[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(j - 1)) -
                               u[r] - v[j];
        if (reduced < min_to[j]) {
          min_to[j] = reduced;
          way[j] = col0;
        }
        if (min_to[j] < delta) {
          delta = min_to[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_to[j] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  result.assignment.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) result.assignment[match[j] - 1] = j - 1;
  // Sum in row order from the original costs so the value does not carry potential drift.
  for (std::size_t i = 0; i < n; ++i) {
    result.cost += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(result.assignment[i]));
  }
  return result;
}

namespace {

std::vector<std::size_t> sorted_order(const Matrix& column) {
  std::vector<std::size_t> order(static_cast<std::size_t>(column.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return column(static_cast<Eigen::Index>(a), 0) < column(static_cast<Eigen::Index>(b), 0);
  });
  return order;
}

// Squared cost on the line: the monotone coupling is optimal.
MseSigmaResult mse_sigma_line(const Matrix& z1, const Matrix& z2) {
  const auto o1 = sorted_order(z1);
  const auto o2 = sorted_order(z2);
  MseSigmaResult out;
  out.permutation.assign(o1.size(), 0);
  double total = 0.0;
  for (std::size_t k = 0; k < o1.size(); ++k) {
    out.permutation[o1[k]] = o2[k];
    const double d = z1(static_cast<Eigen::Index>(o1[k]), 0) - z2(static_cast<Eigen::Index>(o2[k]), 0);
    total += d * d;
  }
  out.value = std::sqrt(total / static_cast<double>(o1.size()));
  return out;
}

// W2 between uniform empirical measures on the line, by merging the two quantile functions.
double wasserstein2_line(const Matrix& p1, const Matrix& p2) {
  std::vector<double> a(p1.data(), p1.data() + p1.rows());
  std::vector<double> b(p2.data(), p2.data() + p2.rows());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto n = static_cast<std::uint64_t>(a.size());
  const auto m = static_cast<std::uint64_t>(b.size());
  // Work on the common grid of multiples of 1/(n m) to keep the breakpoints exact.
  std::uint64_t pos = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  double total = 0.0;
  while (i < a.size() && j < b.size()) {
    const std::uint64_t next_a = (i + 1) * m;
    const std::uint64_t next_b = (j + 1) * n;
    const std::uint64_t next = std::min(next_a, next_b);
    const double d = a[i] - b[j];
    total += static_cast<double>(next - pos) * d * d;
    pos = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return std::sqrt(total / static_cast<double>(n * m));
}

}  // namespace

MseSigmaResult mse_sigma_exact(const Matrix& z1, const Matrix& z2, std::size_t cap) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
    throw ShapeError("mse_sigma: signals must have equal shapes");
  }
  if (z1.rows() > 0 && z1.cols() == 1) return mse_sigma_line(z1, z2);
  if (static_cast<std::size_t>(z1.rows()) > cap) {
    throw CapacityError("mse_sigma_exact: n = " + std::to_string(z1.rows()) + " exceeds cap " +
                        std::to_string(cap) + "; use mse_sigma_entropic");
  }
  if (z1.rows() == 0) throw ShapeError("mse_sigma: empty signals");
  const AssignmentResult a = solve_assignment(squared_distance_cost(z1, z2));
  return {std::sqrt(std::max(0.0, a.cost) / static_cast<double>(z1.rows())), a.assignment};
}

namespace {

double log_sum_exp(const double* values, Eigen::Index count, Eigen::Index stride) {
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < count; ++k) peak = std::max(peak, values[k * stride]);
  if (!std::isfinite(peak)) return peak;
  double s = 0.0;
  for (Eigen::Index k = 0; k < count; ++k) s += std::exp(values[k * stride] - peak);
  return peak + std::log(s);
}

double median_of(const Matrix& m) {
  std::vector<double> values(m.data(), m.data() + m.size());
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace

SinkhornResult sinkhorn_uniform(const Matrix& u, const Matrix& v, const SinkhornOptions& options) {
  if (u.rows() == 0 || v.rows() == 0) throw ShapeError("sinkhorn: empty point cloud");
  const Matrix cost = squared_distance_cost(u, v);
  const Eigen::Index n = cost.rows();
  const Eigen::Index m = cost.cols();
  SinkhornResult out;
  double eps = options.epsilon.value_or(1e-2 * median_of(cost));
  if (!options.epsilon && !(eps > 0.0)) eps = 1e-12;  // all-zero cost: any positive value works
  if (!(eps > 0.0)) throw ConfigError("sinkhorn: epsilon must be positive");
  out.epsilon = eps;
  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(m));

  Vector f = Vector::Zero(n);
  Vector g = Vector::Zero(m);
  Matrix work(n, m);
  // One f/g sweep at regularization e; returns the L1 row-marginal violation.
  auto sweep = [&](double e) {
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) work(i, j) = (g[j] - cost(i, j)) / e + log_b;
    }
    for (Eigen::Index i = 0; i < n; ++i) f[i] = -e * log_sum_exp(&work(i, 0), m, n);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) work(i, j) = (f[i] - cost(i, j)) / e + log_a;
      g[j] = -e * log_sum_exp(&work(0, j), n, 1);
    }
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) row += std::exp((f[i] + g[j] - cost(i, j)) / e + log_a + log_b);
      err += std::abs(row - std::exp(log_a));
    }
    return err;
  };
  // Epsilon scaling: anneal from the cost scale down to eps with warm-started potentials.
  std::vector<double> schedule;
  for (double e = std::max(cost.maxCoeff(), eps); e > eps; e *= 0.5) schedule.push_back(e);
  schedule.push_back(eps);
  for (std::size_t stage = 0; stage < schedule.size() && out.iterations < options.max_iter; ++stage) {
    const bool last = stage + 1 == schedule.size();
    const double stage_tol = last ? options.tol : std::max(options.tol, 1e-3);
    while (out.iterations < options.max_iter) {
      ++out.iterations;
      out.marginal_error = sweep(schedule[stage]);
      if (out.marginal_error <= stage_tol) {
        out.converged = last;
        break;
      }
    }
  }
  double transport = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      transport += std::exp((f[i] + g[j] - cost(i, j)) / eps + log_a + log_b) * cost(i, j);
    }
  }
  out.value = std::sqrt(std::max(0.0, transport));
  return out;
}

SinkhornResult mse_sigma_entropic(const Matrix& z1, const Matrix& z2, const SinkhornOptions& options) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
    throw ShapeError("mse_sigma: signals must have equal shapes");
  }
  return sinkhorn_uniform(z1, z2, options);
}

WassersteinResult wasserstein2_empirical(const Matrix& points1, const Matrix& points2,
                                         std::size_t cap) {
  if (points1.rows() == 0 || points2.rows() == 0) throw ShapeError("wasserstein2: empty cloud");
  if (points1.cols() != points2.cols()) throw ShapeError("wasserstein2: dimensions differ");
  const auto n = static_cast<std::size_t>(points1.rows());
  const auto m = static_cast<std::size_t>(points2.rows());
  if (points1.cols() == 1) return {wasserstein2_line(points1, points2), true};
  const std::size_t l = std::lcm(n, m);
  if (l > cap) {
    return {sinkhorn_uniform(points1, points2).value, false};
  }
  // Uniform weights 1/n and 1/m: replicating each point l/n (resp. l/m) times turns the
  // Kantorovich problem into an assignment with uniform weights 1/l.
  auto replicate = [l](const Matrix& p) {
    const Eigen::Index copies = static_cast<Eigen::Index>(l) / p.rows();
    Matrix out(static_cast<Eigen::Index>(l), p.cols());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index c = 0; c < copies; ++c) out.row(i * copies + c) = p.row(i);
    }
    return out;
  };
  const Matrix a = n == l ? points1 : replicate(points1);
  const Matrix b = m == l ? points2 : replicate(points2);
  const AssignmentResult res = solve_assignment(squared_distance_cost(a, b));
  return {std::sqrt(std::max(0.0, res.cost) / static_cast<double>(l)), true};
}

Matrix kernel_matrix(const Kernel& kernel, const PointMatrix& latents, bool zero_diagonal) {
  const Eigen::Index n = latents.rows();
  const PointMatrix warped = kernel.warp(latents);
  Matrix k(n, n);
  std::vector<double> row(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    kernel.row_warped(row_view(warped, i), warped, row);
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = row[static_cast<std::size_t>(j)];
    if (zero_diagonal) k(i, i) = 0.0;
  }
  return k;
}

double laplacian_spectral_distance(const SampledGraph& graph, const RandomGraphModel& model,
                                   bool use_exact_kernel) {
  if (graph.latents.rows() != static_cast<Eigen::Index>(graph.n) || graph.latents.cols() == 0) {
    throw ShapeError("laplacian_spectral_distance: graph carries no latents");
  }
  if (graph.n > kDenseKernelCap) {
    throw CapacityError("laplacian_spectral_distance: n exceeds the dense kernel cap of 8000");
  }
  const NormalizedLaplacian l_a = build_laplacian(graph);
  const Matrix l_w = normalized_laplacian_dense(kernel_matrix(model.kernel, graph.latents,
                                                              use_exact_kernel));
  PowerIterationOptions opts;
  opts.restarts = 3;
  return power_iteration_norm(
      [&](const Vector& v) { return (l_a.matvec(v) - l_w * v).eval(); },
      static_cast<Eigen::Index>(graph.n), opts);
}

}  // namespace rgcn
