#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rgcn/bounds.hpp"
#include "rgcn/reference.hpp"

using namespace rgcn;

namespace {

RandomGraphModel square_model(Kernel kernel) {
  return {"square",
          LatentSpace::box(Vector::Zero(2), Vector::Ones(2), 2, "unit square"),
          NodeDistribution::uniform_cube(Vector::Zero(2), Vector::Ones(2)),
          std::move(kernel),
          SignalFunction::coordinate(1, 1.0),
          SparsitySchedule::constant(1.0)};
}

RandomGraphModel sbm_model() {
  Matrix blocks(2, 2);
  blocks << 1.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0;
  PointMatrix centers(2, 1);
  centers << 0.0, 1.0;
  return {"sbm",
          LatentSpace::box(Vector::Constant(1, -0.5), Vector::Constant(1, 1.5), 1, "line"),
          NodeDistribution::finite_mixture({1.0 / 3.0, 2.0 / 3.0}, centers, 0.1),
          Kernel::sbm_block(blocks, centers, {1.0, 5.0 / 9.0, 0.0, 2}),
          SignalFunction::constant(Vector::Ones(1)),
          SparsitySchedule::constant(1.0)};
}

}  // namespace

TEST_CASE("reference operator matches a dense construction") {
  const auto model = square_model(Kernel::gaussian_rbf(0.3, {1.0, 0.2, 3.0, 1}));
  const auto ref = build_reference(model, 150, 3);
  const auto stream = build_reference(model, 150, 3, {true, 0});
  CHECK(ref.is_dense());
  CHECK_FALSE(stream.is_dense());
  const PointMatrix& x = ref.latents();
  const Eigen::Index n = x.rows();
  Matrix w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = (x.row(i) - x.row(j)).squaredNorm();
  }
  w = (-w / (2.0 * 0.09)).array().exp().matrix();
  const Vector d = w.rowwise().sum() / static_cast<double>(n);
  Matrix oracle(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) oracle(i, j) = w(i, j) / (static_cast<double>(n) * std::sqrt(d[i] * d[j]));
  }
  const Matrix v = Matrix::Random(n, 2);
  CHECK((ref.matvec(v) - oracle * v).norm() < 1e-12);
  CHECK((stream.matvec(v) - oracle * v).norm() < 1e-12);
  CHECK((ref.degrees() - d).norm() < 1e-13);
  // the degree-normalized operator fixes sqrt(d)
  const Vector sd = d.cwiseSqrt();
  CHECK((ref.matvec(sd) - sd).norm() < 1e-12);
}

TEST_CASE("extension at reference points equals the forward pass") {
  const auto model = square_model(Kernel::gaussian_rbf(0.3, {1.0, 0.2, 3.0, 1}));
  const auto ref = build_reference(model, 200, 5);
  InitPolicy policy;
  policy.bias_std = 0.2;
  const auto params = random_init({1, 4, 4}, 2, 3, policy);
  const auto fwd = cgcn_forward(params, ref, model.signal);
  const Matrix ext = evaluate_at(ref, params, model.signal, ref.latents(), &fwd);
  CHECK((ext - fwd.equivariant).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fwd.invariant[0] == doctest::Approx(fwd.equivariant.col(0).mean()));
}

TEST_CASE("constant kernel reduces the operator to integration") {
  RandomGraphModel model{"line", LatentSpace::box(Vector::Zero(1), Vector::Ones(1), 1, "interval"),
                         NodeDistribution::uniform_cube(Vector::Zero(1), Vector::Ones(1)),
                         Kernel::constant(0.5, {0.5, 0.5, 0.0, 1}),
                         SignalFunction::coordinate(0, 1.0), SparsitySchedule::constant(1.0)};
  const auto quad = build_quadrature_reference(model, 101);
  const Matrix f = model.signal.evaluate(quad.latents());
  const Matrix lf = quad.matvec(f);
  // integral of x over [0,1], exact for the trapezoid rule on a linear function
  CHECK(lf.cwiseAbs().maxCoeff() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lf.minCoeff() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(build_quadrature_reference(square_model(Kernel::constant(0.5, {0.5, 0.5, 0.0, 1})), 10),
                  UnsupportedEstimate);
}

TEST_CASE("degree floor violations are sampling failures") {
  // declared c_min far above the actual degree of a narrow threshold kernel
  const auto model = square_model(Kernel::epsilon_threshold(0.01, {1.0, 0.9, 0.0, 2}));
  CHECK_THROWS_AS(build_reference(model, 100, 1), SamplingFailure);

  const auto ok = square_model(Kernel::gaussian_rbf(0.2, {1.0, 0.05, 3.0, 1}));
  const auto ref = build_reference(ok, 100, 1);
  const Vector far = Vector::Constant(2, 10.0);
  CHECK_THROWS_AS(ref.query_row(vector_view(far)), SamplingFailure);
}

TEST_CASE("stratified SBM reference has exactly constant degrees") {
  const auto model = sbm_model();
  const auto ref = build_reference(model, 300, 4);
  CHECK((ref.degrees().array() - 5.0 / 9.0).abs().maxCoeff() < 1e-12);
  const auto params = random_init({1, 5, 5}, 3, 6).without_bias();
  const auto fwd = cgcn_forward(params, ref, model.signal);
  const double spread = fwd.equivariant.maxCoeff() - fwd.equivariant.minCoeff();
  CHECK(spread <= 1e-8);
}

TEST_CASE("c-GCN values respect the sup-norm envelope") {
  const auto model = square_model(Kernel::gaussian_rbf(0.3, {1.0, 0.2, 3.0, 1}));
  const auto ref = build_reference(model, 300, 8);
  const double c_min = ref.degrees().minCoeff();
  InitPolicy policy;
  policy.bias_std = 0.5;
  const auto params = random_init({1, 4, 4, 4}, 3, 12, policy);
  const auto fwd = cgcn_forward(params, ref, model.signal);
  const auto norms = compute_filter_norms(params, 1.0, c_min);
  for (int l = 1; l <= params.layer_count(); ++l) {
    const Matrix& layer_values = l < params.layer_count() ? fwd.trace[static_cast<std::size_t>(l)].input
                                                          : propagate(params, ref, fwd.input);
    const double sup = layer_values.rowwise().norm().maxCoeff();
    CHECK(sup <= cgcn_sup_bound(norms, 1.0, l));
  }
}

TEST_CASE("reference CSV export") {
  const auto model = square_model(Kernel::gaussian_rbf(0.3, {1.0, 0.2, 3.0, 1}));
  const auto ref = build_reference(model, 20, 8);
  const auto params = random_init({1, 2}, 1, 1);
  const auto fwd = cgcn_forward(params, ref, model.signal);
  const auto path = std::filesystem::temp_directory_path() / "rgcn_ref.csv";
  write_reference_csv(ref, fwd, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x0,x1,y0");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 20);
  std::filesystem::remove(path);
}
