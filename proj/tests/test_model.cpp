#include <doctest.h>

#include <cmath>

#include "rgcn/model.hpp"
#include "rgcn/rng.hpp"

using namespace rgcn;

namespace {

RandomGraphModel unit_square_model(Kernel kernel) {
  return {"square",
          LatentSpace::box(Vector::Zero(2), Vector::Ones(2), 2, "unit square"),
          NodeDistribution::uniform_cube(Vector::Zero(2), Vector::Ones(2)),
          std::move(kernel),
          SignalFunction::constant(Vector::Ones(1)),
          SparsitySchedule::constant(1.0)};
}

}  // namespace

TEST_CASE("counter rng is deterministic and roughly uniform") {
  CounterRng a(42), b(42);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(pair_uniform(3, 5, 9) == pair_uniform(3, 9, 5));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
}

TEST_CASE("latent sampling is reproducible and stays in the box") {
  auto model = unit_square_model(Kernel::gaussian_rbf(0.3, {1.0, 0.1, 1.0, 1}));
  const PointMatrix a = sample_latents(model, 500, 11);
  const PointMatrix b = sample_latents(model, 500, 11);
  CHECK(a == b);
  CHECK(a != sample_latents(model, 500, 12));
  for (Eigen::Index i = 0; i < a.rows(); ++i) CHECK(model.space.contains(row_view(a, i)));
  // prefix property: the first k latents do not depend on n
  CHECK(sample_latents(model, 100, 11) == a.topRows(100));
}

TEST_CASE("bumped surface points satisfy the surface equation") {
  const auto dist = NodeDistribution::bumped_surface(0.25);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const Vector x = dist.sample(5, i);
    const double expected =
        0.25 * std::sin(2.0 * std::numbers::pi * x[0]) * std::sin(2.0 * std::numbers::pi * x[1]);
    CHECK(x[2] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("mixture weights must sum to one") {
  PointMatrix centers(2, 1);
  centers << 0.0, 1.0;
  CHECK_THROWS_AS(NodeDistribution::finite_mixture({0.5, 0.6}, centers, 0.0), ConfigError);
  const auto mix = NodeDistribution::finite_mixture({1.0 / 3.0, 2.0 / 3.0}, centers, 0.0);
  int ones = 0;
  for (std::uint64_t i = 0; i < 30000; ++i) ones += mix.sample(2, i)[0] == 1.0 ? 1 : 0;
  // binomial(30000, 2/3): sd ~ 82
  CHECK(std::abs(ones - 20000) < 500);
  CHECK(mix.sample_component(1, 2, 7)[0] == 1.0);
}

TEST_CASE("kernels evaluate their closed forms") {
  const Vector x = (Vector(2) << 0.1, 0.2).finished();
  const Vector y = (Vector(2) << 0.4, 0.6).finished();
  const double d2 = 0.09 + 0.16;
  const auto g = Kernel::gaussian_rbf(0.5, {1.0, 0.1, 1.0, 1});
  CHECK(g(vector_view(x), vector_view(y)) == doctest::Approx(std::exp(-d2 / 0.5)));
  const auto eps = Kernel::epsilon_threshold(0.5, {1.0, 0.1, 0.0, 2});
  CHECK(eps(vector_view(x), vector_view(y)) == 1.0);
  const auto eps_small = Kernel::epsilon_threshold(0.49, {1.0, 0.1, 0.0, 2});
  CHECK(eps_small(vector_view(x), vector_view(y)) == 0.0);
  CHECK(Kernel::constant(0.5, {0.5, 0.5, 0.0, 1})(vector_view(x), vector_view(y)) == 0.5);
  CHECK(g.translation_invariant());
  std::vector<double> row(2);
  PointMatrix ys(3, 2);
  ys << 0.0, 0.0, 0.4, 0.6, 0.1, 0.2;
  g.row_warped(vector_view(x), ys, row, 1);
  CHECK(row[0] == doctest::Approx(std::exp(-d2 / 0.5)));
  CHECK(row[1] == doctest::Approx(1.0));
}

TEST_CASE("sbm kernel assigns communities by nearest center") {
  Matrix blocks(2, 2);
  blocks << 1.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0;
  PointMatrix centers(2, 1);
  centers << 0.0, 1.0;
  const auto k = Kernel::sbm_block(blocks, centers, {1.0, 1.0 / 3.0, 0.0, 2});
  const Vector a = Vector::Constant(1, 0.1);
  const Vector b = Vector::Constant(1, 0.9);
  CHECK(k(vector_view(a), vector_view(b)) == doctest::Approx(1.0 / 3.0));
  CHECK(k(vector_view(b), vector_view(b)) == doctest::Approx(2.0 / 3.0));
  CHECK(k.community(vector_view(b)) == 1);
}

TEST_CASE("gaussian profile gradient matches finite differences") {
  const auto g = Kernel::gaussian_rbf(0.3, {1.0, 0.1, 1.0, 1});
  const Vector z = (Vector(2) << 0.12, -0.07).finished();
  const Vector grad = *g.profile_gradient(vector_view(z));
  const Vector zero = Vector::Zero(2);
  for (int k = 0; k < 2; ++k) {
    Vector zp = z, zm = z;
    zp[k] += 1e-6;
    zm[k] -= 1e-6;
    const double fd = (g(vector_view(zp), vector_view(zero)) - g(vector_view(zm), vector_view(zero))) / 2e-6;
    CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("deformations and their jacobians") {
  const auto bump = Deformation::gaussian_bump((Vector(2) << 0.5, 0.5).finished(), 0.2, 0.1);
  const Vector x = (Vector(2) << 0.55, 0.4).finished();
  const Matrix analytic = bump.jacobian(vector_view(x));
  Matrix fd(2, 2);
  for (int k = 0; k < 2; ++k) {
    Vector xp = x, xm = x;
    xp[k] += 1e-6;
    xm[k] -= 1e-6;
    fd.col(k) = (bump.displacement(vector_view(xp)) - bump.displacement(vector_view(xm))) / 2e-6;
  }
  CHECK((analytic - fd).norm() < 1e-7);

  const auto scale = Deformation::scaling(2, 0.2);
  CHECK((scale.apply(vector_view(x)) - 0.8 * x).norm() < 1e-15);
  CHECK((scale.jacobian(vector_view(x)) - 0.2 * Matrix::Identity(2, 2)).norm() < 1e-15);
  const auto shift = Deformation::translation((Vector(2) << 1.0, 0.0).finished(), 0.3);
  CHECK(shift.jacobian(vector_view(x)).norm() == 0.0);
  CHECK(shift.apply(vector_view(x))[0] == doctest::Approx(0.25));
}

TEST_CASE("sparsity schedules") {
  CHECK(SparsitySchedule::constant(0.25).at(1000) == 0.25);
  CHECK(SparsitySchedule::log_over_n(4.0).at(1000) == doctest::Approx(4.0 * std::log(1000.0) / 1000.0));
  CHECK(SparsitySchedule::log_over_n(4.0).at(3) == 1.0);
  CHECK(SparsitySchedule::power(1.0, 0.5).at(100) == doctest::Approx(0.1));
  CHECK_THROWS_AS(SparsitySchedule::constant(0.0).at(10), ModelError);
}

TEST_CASE("degree function estimate for a constant kernel is exact") {
  auto model = unit_square_model(Kernel::constant(0.5, {0.5, 0.5, 0.0, 1}));
  const Vector x = Vector::Constant(2, 0.3);
  const Estimate e = estimate_degree_function(model, vector_view(x), 1000, 3);
  CHECK(e.value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e.std_error == doctest::Approx(0.0));
}

TEST_CASE("deformation domain check and size measures") {
  auto model = unit_square_model(Kernel::gaussian_rbf(0.2, {1.0, 0.1, 5.0, 1}));
  const auto shift = Deformation::translation((Vector(2) << 1.0, 0.0).finished(), 0.5);
  CHECK_THROWS_AS(deform_model(model, shift, DeformTarget::Distribution), DomainError);
  CHECK_NOTHROW(deform_model(model, shift, DeformTarget::Kernel));

  const auto scale = Deformation::scaling(2, 0.1);
  DeformationSizeOptions opts;
  opts.n_mc = 2000;
  opts.n_outer = 20;
  const DeformationSize s = deformation_size(scale, model, opts);
  CHECK(s.sup_grad_tau == doctest::Approx(0.1));
  // q = det(I - 0.1 I)^-1 = 1/0.81
  REQUIRE(s.n_p_tau.has_value());
  CHECK(*s.n_p_tau == doctest::Approx(1.0 / 0.81 - 1.0));
  CHECK(s.c_grad_w.has_value());

  const DeformationSize t = deformation_size(shift.with_amplitude(0.0), model, opts);
  CHECK(t.sup_grad_tau == 0.0);
  CHECK(*t.n_p_tau == 0.0);
}

TEST_CASE("size measures without a density") {
  RandomGraphModel model{"surface", LatentSpace::box(Vector::Constant(3, -1.0), Vector::Ones(3), 2, "surface"),
                         NodeDistribution::bumped_surface(0.2),
                         Kernel::epsilon_threshold(0.3, {1.0, 0.1, 0.0, 2}),
                         SignalFunction::constant(Vector::Ones(1)), SparsitySchedule::constant(1.0)};
  DeformationSizeOptions opts;
  opts.n_mc = 100;
  opts.n_outer = 5;
  const auto tau = Deformation::scaling(3, 0.1);
  CHECK_FALSE(deformation_size(tau, model, opts).n_p_tau.has_value());
  opts.require_density = true;
  CHECK_THROWS_AS(deformation_size(tau, model, opts), UnsupportedEstimate);
}

TEST_CASE("signal l2 norm of a constant") {
  auto model = unit_square_model(Kernel::constant(1.0, {1.0, 1.0, 0.0, 1}));
  model.signal = SignalFunction::constant((Vector(2) << 3.0, 4.0).finished());
  CHECK(signal_l2_norm(model, 100, 1).value == doctest::Approx(5.0));
}
