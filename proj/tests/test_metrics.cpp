#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "rgcn/metrics.hpp"
#include "rgcn/rng.hpp"

using namespace rgcn;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, CounterRng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

double brute_force_mse_sigma(const Matrix& a, const Matrix& b) {
  std::vector<int> perm(static_cast<std::size_t>(a.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) s += (a.row(static_cast<Eigen::Index>(i)) - b.row(perm[i])).squaredNorm();
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / static_cast<double>(a.rows()));
}

// 1-D W2 between uniform empirical measures via the quantile coupling.
double quantile_w2(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::vector<double> cuts;
  for (std::size_t i = 0; i <= a.size(); ++i) cuts.push_back(static_cast<double>(i) / n);
  for (std::size_t j = 0; j <= b.size(); ++j) cuts.push_back(static_cast<double>(j) / m);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double len = cuts[k + 1] - cuts[k];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    const double qa = a[static_cast<std::size_t>(mid * n)];
    const double qb = b[static_cast<std::size_t>(mid * m)];
    total += len * (qa - qb) * (qa - qb);
  }
  return std::sqrt(total);
}

RandomGraphModel square_model(Kernel kernel) {
  return {"square",
          LatentSpace::box(Vector::Zero(2), Vector::Ones(2), 2, "unit square"),
          NodeDistribution::uniform_cube(Vector::Zero(2), Vector::Ones(2)),
          std::move(kernel),
          SignalFunction::constant(Vector::Ones(1)),
          SparsitySchedule::constant(1.0)};
}

}  // namespace

TEST_CASE("mse_x") {
  const Matrix a = (Matrix(2, 1) << 1.0, 2.0).finished();
  const Matrix b = (Matrix(2, 1) << 1.0, 4.0).finished();
  CHECK(mse_x(a, b) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(mse_x(a, Matrix::Zero(3, 1)), ShapeError);
}

TEST_CASE("assignment equals brute force") {
  CounterRng rng(1);
  for (int n = 2; n <= 7; ++n) {
    for (int inst = 0; inst < 10; ++inst) {
      const Matrix a = random_matrix(n, 2, rng);
      const Matrix b = random_matrix(n, 2, rng);
      const auto res = mse_sigma_exact(a, b);
      CHECK(std::abs(res.value - brute_force_mse_sigma(a, b)) <= 1e-12);
      std::vector<std::size_t> sorted = res.permutation;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
    }
  }
}

TEST_CASE("mse_sigma of a permuted signal is zero") {
  const Matrix a = (Matrix(3, 1) << 1.0, 2.0, 3.0).finished();
  const Matrix b = (Matrix(3, 1) << 3.0, 1.0, 2.0).finished();
  const auto res = mse_sigma_exact(a, b);
  CHECK(res.value == 0.0);
  CHECK(res.permutation == std::vector<std::size_t>{1, 2, 0});
  CHECK_THROWS_AS(mse_sigma_exact(a, Matrix::Zero(2, 1)), ShapeError);
  CHECK_THROWS_AS(mse_sigma_exact(Matrix::Zero(10, 2), Matrix::Zero(10, 2), 5), CapacityError);
}

TEST_CASE("sinkhorn approaches the exact value as epsilon shrinks") {
  CounterRng rng(5);
  const Matrix a = random_matrix(30, 2, rng);
  const Matrix b = random_matrix(30, 2, rng);
  const double exact = mse_sigma_exact(a, b).value;
  SinkhornOptions loose;
  loose.epsilon = 0.3;
  const auto coarse = mse_sigma_entropic(a, b, loose);
  CHECK(coarse.converged);
  CHECK(coarse.marginal_error <= 1e-9);
  CHECK(coarse.value >= exact - 1e-9);
  // default epsilon is 1e-2 of the median cost; convergence to 1e-9 may need more sweeps
  const auto sharp = mse_sigma_entropic(a, b);
  CHECK(sharp.value == doctest::Approx(exact).epsilon(2e-2));
  CHECK(std::abs(sharp.value - exact) <= std::abs(coarse.value - exact) + 1e-12);
  SinkhornOptions capped;
  capped.max_iter = 1;
  capped.epsilon = 1e-4;
  CHECK_FALSE(mse_sigma_entropic(a, b, capped).converged);
}

TEST_CASE("W2 for unequal sizes matches the quantile coupling") {
  CounterRng rng(9);
  for (auto [n, m] : std::vector<std::pair<int, int>>{{5, 5}, {4, 6}, {7, 3}, {12, 8}}) {
    const Matrix a = random_matrix(n, 1, rng);
    const Matrix b = random_matrix(m, 1, rng);
    const std::vector<double> va(a.data(), a.data() + a.size());
    const std::vector<double> vb(b.data(), b.data() + b.size());
    const double oracle = quantile_w2(va, vb);
    const auto res = wasserstein2_empirical(a, b);
    CHECK(res.exact);
    CHECK(res.value == doctest::Approx(oracle).epsilon(1e-12));
    // the replicated-assignment route on the same data, embedded in the plane
    Matrix a2 = Matrix::Zero(n, 2), b2 = Matrix::Zero(m, 2);
    a2.col(0) = a;
    b2.col(0) = b;
    const auto planar = wasserstein2_empirical(a2, b2);
    CHECK(planar.exact);
    CHECK(planar.value == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("sorting and assignment agree on single-column signals") {
  CounterRng rng(21);
  for (int n : {2, 5, 40, 200}) {
    const Matrix a = random_matrix(n, 1, rng);
    const Matrix b = random_matrix(n, 1, rng);
    const auto sorted = mse_sigma_exact(a, b);
    const auto assigned = solve_assignment(squared_distance_cost(a, b));
    CHECK(sorted.value == doctest::Approx(std::sqrt(assigned.cost / n)).epsilon(1e-12));
    double check = 0.0;
    for (int i = 0; i < n; ++i) check += std::pow(a(i, 0) - b(static_cast<Eigen::Index>(sorted.permutation[static_cast<std::size_t>(i)]), 0), 2);
    CHECK(std::sqrt(check / n) == doctest::Approx(sorted.value).epsilon(1e-12));
  }
  CHECK_NOTHROW(mse_sigma_exact(Matrix::Zero(5000, 1), Matrix::Zero(5000, 1)));
}

TEST_CASE("W2 equals mse_sigma for equal sizes") {
  CounterRng rng(13);
  const Matrix a = random_matrix(20, 3, rng);
  const Matrix b = random_matrix(20, 3, rng);
  CHECK(wasserstein2_empirical(a, b).value == doctest::Approx(mse_sigma_exact(a, b).value).epsilon(1e-12));
  const auto approx = wasserstein2_empirical(a, random_matrix(19, 3, rng), 50);
  CHECK_FALSE(approx.exact);
}

TEST_CASE("spectral distance vanishes when the graph is its own expectation") {
  const auto full = square_model(Kernel::constant(1.0, {1.0, 1.0, 0.0, 1}));
  const auto g = sample_graph(full, 60, 1);
  CHECK(laplacian_spectral_distance(g, full) < 1e-12);
  // literal W(X) keeps the diagonal: complete graph vs all-ones gives 1/(n-1)
  CHECK(laplacian_spectral_distance(g, full, false) == doctest::Approx(1.0 / 59.0).epsilon(1e-8));

  const auto eps = square_model(Kernel::epsilon_threshold(0.3, {1.0, 0.1, 0.0, 2}));
  const auto ge = sample_graph(eps, 200, 2);
  CHECK(laplacian_spectral_distance(ge, eps) < 1e-12);
}

TEST_CASE("spectral distance agrees with a dense eigen-solve") {
  const auto half = square_model(Kernel::constant(0.5, {0.5, 0.5, 0.0, 1}));
  const auto g = sample_graph(half, 120, 3);
  const Matrix la = build_laplacian(g).dense();
  const Matrix lw = normalized_laplacian_dense(kernel_matrix(half.kernel, g.latents, true));
  Eigen::SelfAdjointEigenSolver<Matrix> es(la - lw);
  const double exact = es.eigenvalues().cwiseAbs().maxCoeff();
  const double estimate = laplacian_spectral_distance(g, half);
  // power iteration approaches the top of a nearly degenerate spectrum from below
  CHECK(estimate <= exact + 1e-12);
  CHECK(estimate == doctest::Approx(exact).epsilon(1e-3));
}
