#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "rgcn/graph.hpp"
#include "rgcn/rng.hpp"

using namespace rgcn;

namespace {

RandomGraphModel square_model(Kernel kernel, double alpha = 1.0) {
  return {"square",
          LatentSpace::box(Vector::Zero(2), Vector::Ones(2), 2, "unit square"),
          NodeDistribution::uniform_cube(Vector::Zero(2), Vector::Ones(2)),
          std::move(kernel),
          SignalFunction::coordinate(0, 1.0),
          SparsitySchedule::constant(alpha)};
}

// Independent dense construction of D^-1/2 A D^-1/2 from the edge list.
Matrix dense_normalized(std::size_t n, const std::vector<std::pair<std::int64_t, std::int64_t>>& edges) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (auto [i, j] : edges) a(i, j) = a(j, i) = 1.0;
  const Vector d = a.rowwise().sum();
  Matrix l(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      l(i, j) = (d[i] > 0 && d[j] > 0) ? a(i, j) / std::sqrt(d[i] * d[j]) : 0.0;
    }
  }
  return l;
}

}  // namespace

TEST_CASE("complete and empty graphs") {
  const auto full = sample_graph(square_model(Kernel::constant(1.0, {1.0, 1.0, 0.0, 1})), 30, 4);
  CHECK(full.edge_count() == 30 * 29 / 2);
  const auto lap = build_laplacian(full);
  CHECK(lap.matrix().coeff(0, 1) == doctest::Approx(1.0 / 29.0));

  const auto empty = sample_graph(square_model(Kernel::epsilon_threshold(1e-9, {1.0, 1e-9, 0.0, 2})), 30, 4);
  CHECK(empty.edge_count() == 0);
  const auto lap0 = build_laplacian(empty);
  CHECK(lap0.isolated_count() == 30);
  CHECK(lap0.matvec(Vector::Ones(30).eval()).norm() == 0.0);
}

TEST_CASE("edge counts follow the binomial law") {
  const auto model = square_model(Kernel::constant(0.5, {0.5, 0.5, 0.0, 1}));
  const std::size_t n = 400;
  const double pairs = n * (n - 1) / 2.0;
  double total = 0.0;
  const int reps = 5;
  for (int s = 0; s < reps; ++s) total += static_cast<double>(sample_graph(model, n, s).edge_count());
  const double sd = std::sqrt(reps * pairs * 0.25);
  CHECK(std::abs(total - reps * pairs * 0.5) < 5.0 * sd);
}

TEST_CASE("sampling is deterministic per seed pair") {
  const auto model = square_model(Kernel::gaussian_rbf(0.3, {1.0, 0.3, 3.0, 1}));
  const auto a = sample_graph(model, 200, GraphSeeds{1, 2});
  const auto b = sample_graph(model, 200, GraphSeeds{1, 2});
  const auto c = sample_graph(model, 200, GraphSeeds{1, 3});
  CHECK(a.edges == b.edges);
  CHECK(a.latents == c.latents);
  CHECK(a.edges != c.edges);
  for (auto [i, j] : a.edges) CHECK(i < j);
  CHECK(std::is_sorted(a.edges.begin(), a.edges.end()));
}

TEST_CASE("relabelled latents with relabelled keys give the relabelled graph") {
  const auto model = square_model(Kernel::gaussian_rbf(0.3, {1.0, 0.3, 3.0, 1}));
  const std::size_t n = 60;
  const PointMatrix x = sample_latents(model, n, 9);
  std::vector<std::uint64_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng rng(77);
  std::shuffle(perm.begin(), perm.end(), rng);
  PointMatrix xp(x.rows(), x.cols());
  for (std::size_t i = 0; i < n; ++i) xp.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));
  const auto g = sample_graph_on_latents(model, x, 1.0, 5);
  const auto gp = sample_graph_on_latents(model, xp, 1.0, 5, perm);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(gp.adjacency.coeff(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)) ==
            g.adjacency.coeff(static_cast<std::int64_t>(perm[i]), static_cast<std::int64_t>(perm[j])));
    }
  }
}

TEST_CASE("probabilities above one are a model error") {
  const auto model = square_model(Kernel::constant(1.0, {1.0, 1.0, 0.0, 1}));
  const PointMatrix x = sample_latents(model, 5, 1);
  auto bad = model;
  bad.kernel = Kernel::custom("two", [](PointView, PointView) { return 2.0; }, {1.0, 1.0, 0.0, 1});
  CHECK_THROWS_AS(sample_graph_on_latents(bad, x, 1.0, 1), ModelError);
  CHECK_THROWS_AS(sample_graph_on_latents(model, x, 1.5, 1), ModelError);
}

TEST_CASE("normalized laplacian matches a dense oracle") {
  const auto model = square_model(Kernel::gaussian_rbf(0.15, {1.0, 0.1, 5.0, 1}), 0.5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = sample_graph_on_latents(model, sample_latents(model, 80, seed), 0.5, seed + 100);
    const auto lap = build_laplacian(g);
    const Matrix oracle = dense_normalized(g.n, g.edges);
    CHECK((lap.dense() - oracle).cwiseAbs().maxCoeff() < 1e-15);
    const Matrix v = Matrix::Random(80, 3);
    CHECK((lap.matvec(v) - oracle * v).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(oracle);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    CHECK(es.eigenvalues().minCoeff() >= -1.0 - 1e-12);
    CHECK(lap.spectral_radius() == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-6));
  }
  const auto g = sample_graph(model, 10, 1);
  const auto lap = build_laplacian(g);
  CHECK_THROWS_AS(lap.matvec(Matrix::Ones(9, 1).eval()), ShapeError);
}

TEST_CASE("dense laplacian of weights") {
  Matrix w(3, 3);
  w << 0, 1, 2, 1, 0, 0, 2, 0, 0;
  const Matrix l = normalized_laplacian_dense(w);
  CHECK(l(0, 2) == doctest::Approx(2.0 / std::sqrt(3.0 * 2.0)));
  Matrix z = Matrix::Zero(2, 2);
  CHECK(normalized_laplacian_dense(z).norm() == 0.0);
}

TEST_CASE("degree input signal") {
  const auto g = graph_from_edges(3, {{0, 1}, {0, 2}});
  const Vector z = degree_input_signal(g, 0.5);
  CHECK(z[0] == doctest::Approx(2.0 / 1.5));
  CHECK(z[1] == doctest::Approx(1.0 / 1.5));
}

TEST_CASE("graph files round-trip") {
  const auto model = square_model(Kernel::gaussian_rbf(0.3, {1.0, 0.3, 3.0, 1}));
  const auto g = sample_graph(model, 50, 3);
  const auto dir = std::filesystem::temp_directory_path() / "rgcn_graph_io";
  std::filesystem::create_directories(dir);
  write_edge_list(g, dir / "g.edges");
  write_node_table(g, dir / "g.csv");
  const auto r = read_graph(dir / "g.edges", dir / "g.csv");
  CHECK(r.edges == g.edges);
  CHECK(r.latents == g.latents);
  CHECK(r.signals == g.signals);
  std::filesystem::remove_all(dir);
}
