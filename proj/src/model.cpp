#include "rgcn/model.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rgcn/rng.hpp"

namespace rgcn {

namespace {

double squared_distance(PointView x, PointView y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  return s;
}

Vector to_vector(PointView x) {
  return Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

}  // namespace

// ---------------------------------------------------------------------------
// LatentSpace

LatentSpace LatentSpace::box(Vector lower, Vector upper, int intrinsic_dimension,
                             std::string description) {
  LatentSpace s;
  s.ambient_dimension = static_cast<int>(lower.size());
  s.intrinsic_dimension = intrinsic_dimension;
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  s.description = std::move(description);
  s.validate();
  return s;
}

double LatentSpace::diameter() const { return (upper - lower).norm(); }

bool LatentSpace::contains(PointView x, double tol) const {
  if (static_cast<int>(x.size()) != ambient_dimension) return false;
  for (int k = 0; k < ambient_dimension; ++k) {
    if (x[k] < lower[k] - tol || x[k] > upper[k] + tol) return false;
  }
  return true;
}

void LatentSpace::validate() const {
  if (intrinsic_dimension < 1 || ambient_dimension < intrinsic_dimension) {
    throw ConfigError("space: need ambient_dimension >= intrinsic_dimension >= 1");
  }
  if (lower.size() != ambient_dimension || upper.size() != ambient_dimension) {
    throw ConfigError("space: bounding box does not match ambient_dimension");
  }
  if ((upper.array() < lower.array()).any()) {
    throw ConfigError("space: bounding box has upper < lower");
  }
}

// ---------------------------------------------------------------------------
// Deformation

Deformation::Deformation(std::string name, int dimension, Map base,
                         std::optional<JacobianMap> jacobian, double amplitude, bool constant)
    : name_(std::move(name)),
      dimension_(dimension),
      base_(std::move(base)),
      jacobian_(std::move(jacobian)),
      amplitude_(amplitude),
      constant_(constant) {}

Deformation Deformation::zero(int dimension) {
  return Deformation(
      "zero", dimension, [dimension](PointView) { return Vector::Zero(dimension).eval(); },
      [dimension](PointView) { return Matrix::Zero(dimension, dimension).eval(); }, 0.0, true);
}

Deformation Deformation::translation(Vector shift, double amplitude) {
  const int d = static_cast<int>(shift.size());
  return Deformation(
      "translation", d, [shift](PointView) { return shift; },
      [d](PointView) { return Matrix::Zero(d, d).eval(); }, amplitude, true);
}

Deformation Deformation::scaling(int dimension, double amplitude) {
  return Deformation(
      "scaling", dimension, [](PointView x) { return to_vector(x); },
      [dimension](PointView) { return Matrix::Identity(dimension, dimension).eval(); },
      amplitude);
}

Deformation Deformation::gaussian_bump(Vector center, double width, double amplitude) {
  const int d = static_cast<int>(center.size());
  const double inv2s2 = 1.0 / (2.0 * width * width);
  const double inv_s2 = 1.0 / (width * width);
  return Deformation(
      "gaussian-bump", d,
      [center, inv2s2](PointView x) {
        const Vector r = to_vector(x) - center;
        return (r * std::exp(-r.squaredNorm() * inv2s2)).eval();
      },
      [center, inv2s2, inv_s2, d](PointView x) {
        const Vector r = to_vector(x) - center;
        const double e = std::exp(-r.squaredNorm() * inv2s2);
        return (e * (Matrix::Identity(d, d) - inv_s2 * r * r.transpose())).eval();
      },
      amplitude);
}

Deformation Deformation::with_amplitude(double amplitude) const {
  Deformation copy = *this;
  copy.amplitude_ = amplitude;
  return copy;
}

Vector Deformation::displacement(PointView x) const { return amplitude_ * base_(x); }

Vector Deformation::apply(PointView x) const { return to_vector(x) - displacement(x); }

PointMatrix Deformation::apply_rows(const PointMatrix& points) const {
  PointMatrix out(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) out.row(i) = apply(row_view(points, i));
  return out;
}

Matrix Deformation::jacobian(PointView x) const {
  if (jacobian_) return amplitude_ * (*jacobian_)(x);
  const double h = kFiniteDifferenceStep;
  Matrix jac(dimension_, dimension_);
  Vector probe = to_vector(x);
  for (int k = 0; k < dimension_; ++k) {
    const double keep = probe[k];
    probe[k] = keep + h;
    const Vector plus = displacement(vector_view(probe));
    probe[k] = keep - h;
    const Vector minus = displacement(vector_view(probe));
    probe[k] = keep;
    jac.col(k) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

// ---------------------------------------------------------------------------
// NodeDistribution

struct NodeDistribution::Impl {
  DistributionKind kind{};
  int dimension = 0;
  Vector lower, upper;
  double amplitude = 0.0;
  std::vector<double> weights;
  std::vector<double> cumulative;
  PointMatrix centers;
  double spread = 0.0;
  std::shared_ptr<const NodeDistribution> base;
  std::optional<Deformation> tau;
  std::optional<Density> density;
};

NodeDistribution NodeDistribution::uniform_cube(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw ConfigError("distribution: uniform-cube bounds must have equal positive length");
  }
  if ((upper.array() < lower.array()).any()) {
    throw ConfigError("distribution: uniform-cube has upper < lower");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = DistributionKind::UniformCube;
  impl->dimension = static_cast<int>(lower.size());
  impl->lower = std::move(lower);
  impl->upper = std::move(upper);
  return NodeDistribution(std::move(impl));
}

NodeDistribution NodeDistribution::bumped_surface(double amplitude) {
  auto impl = std::make_shared<Impl>();
  impl->kind = DistributionKind::ParametricSurface;
  impl->dimension = 3;
  impl->amplitude = amplitude;
  impl->lower = Vector::Zero(2);
  impl->upper = Vector::Ones(2);
  return NodeDistribution(std::move(impl));
}

NodeDistribution NodeDistribution::finite_mixture(std::vector<double> weights, PointMatrix centers,
                                                  double spread) {
  if (weights.empty() || static_cast<Eigen::Index>(weights.size()) != centers.rows()) {
    throw ConfigError("distribution: mixture weights and centers disagree in count");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("distribution: mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("distribution: mixture weights must sum to 1");
  }
  if (spread < 0.0) throw ConfigError("distribution: mixture spread must be nonnegative");
  auto impl = std::make_shared<Impl>();
  impl->kind = DistributionKind::FiniteMixture;
  impl->dimension = static_cast<int>(centers.cols());
  impl->cumulative.resize(weights.size());
  std::partial_sum(weights.begin(), weights.end(), impl->cumulative.begin());
  impl->cumulative.back() = 1.0;
  impl->weights = std::move(weights);
  impl->centers = std::move(centers);
  impl->spread = spread;
  return NodeDistribution(std::move(impl));
}

NodeDistribution NodeDistribution::pushforward(const NodeDistribution& base, const Deformation& tau,
                                               std::optional<Density> density_wrt_base) {
  if (tau.dimension() != base.dimension()) {
    throw ConfigError("distribution: deformation dimension does not match distribution");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = DistributionKind::Pushforward;
  impl->dimension = base.dimension();
  impl->base = std::make_shared<const NodeDistribution>(base);
  impl->tau = tau;
  impl->density = std::move(density_wrt_base);
  return NodeDistribution(std::move(impl));
}

DistributionKind NodeDistribution::kind() const { return impl_->kind; }

std::string NodeDistribution::kind_name() const {
  switch (impl_->kind) {
    case DistributionKind::UniformCube: return "uniform-cube";
    case DistributionKind::ParametricSurface: return "bumped-surface";
    case DistributionKind::FiniteMixture: return "finite-mixture";
    case DistributionKind::Pushforward: return "pushforward";
  }
  return "unknown";
}

int NodeDistribution::dimension() const { return impl_->dimension; }

namespace {

Vector mixture_draw(const PointMatrix& centers, double spread, std::size_t c, CounterRng& rng) {
  Vector x = centers.row(static_cast<Eigen::Index>(c)).transpose();
  if (spread > 0.0) {
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += spread * (2.0 * rng.uniform() - 1.0);
  }
  return x;
}

}  // namespace

Vector NodeDistribution::sample(std::uint64_t seed, std::uint64_t index) const {
  const Impl& p = *impl_;
  CounterRng rng(derive_seed(seed, index));
  switch (p.kind) {
    case DistributionKind::UniformCube: {
      Vector x(p.dimension);
      for (int k = 0; k < p.dimension; ++k) {
        x[k] = p.lower[k] + (p.upper[k] - p.lower[k]) * rng.uniform();
      }
      return x;
    }
    case DistributionKind::ParametricSurface: {
      const double u = rng.uniform();
      const double v = rng.uniform();
      Vector x(3);
      x << u, v,
          p.amplitude * std::sin(2.0 * std::numbers::pi * u) * std::sin(2.0 * std::numbers::pi * v);
      return x;
    }
    case DistributionKind::FiniteMixture: {
      const double u = rng.uniform();
      const auto it = std::upper_bound(p.cumulative.begin(), p.cumulative.end(), u);
      const auto c = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - p.cumulative.begin(),
                                   static_cast<std::ptrdiff_t>(p.cumulative.size()) - 1));
      return mixture_draw(p.centers, p.spread, c, rng);
    }
    case DistributionKind::Pushforward: {
      const Vector x = p.base->sample(seed, index);
      return p.tau->apply(vector_view(x));
    }
  }
  throw ConfigError("distribution: unsupported kind");
}

std::vector<double> NodeDistribution::mixture_weights() const {
  if (impl_->kind == DistributionKind::FiniteMixture) return impl_->weights;
  if (impl_->kind == DistributionKind::Pushforward) return impl_->base->mixture_weights();
  return {};
}

Vector NodeDistribution::sample_component(std::size_t component, std::uint64_t seed,
                                          std::uint64_t index) const {
  const Impl& p = *impl_;
  if (p.kind == DistributionKind::Pushforward) {
    const Vector x = p.base->sample_component(component, seed, index);
    return p.tau->apply(vector_view(x));
  }
  if (p.kind != DistributionKind::FiniteMixture || component >= p.weights.size()) {
    throw std::logic_error("sample_component requires a mixture component");
  }
  CounterRng rng(derive_seed(seed, index));
  rng();  // keep the jitter draws aligned with sample()
  return mixture_draw(p.centers, p.spread, component, rng);
}

const std::optional<NodeDistribution::Density>& NodeDistribution::density_wrt_base() const {
  return impl_->density;
}

bool NodeDistribution::is_uniform_full_dimensional() const {
  return impl_->kind == DistributionKind::UniformCube &&
         ((impl_->upper - impl_->lower).array() > 0.0).all();
}

const Vector& NodeDistribution::lower() const { return impl_->lower; }
const Vector& NodeDistribution::upper() const { return impl_->upper; }
double NodeDistribution::surface_amplitude() const { return impl_->amplitude; }
const PointMatrix& NodeDistribution::centers() const { return impl_->centers; }
double NodeDistribution::spread() const { return impl_->spread; }

const NodeDistribution& NodeDistribution::base() const {
  if (!impl_->base) throw std::logic_error("distribution is not a pushforward");
  return *impl_->base;
}

const Deformation& NodeDistribution::map() const {
  if (!impl_->tau) throw std::logic_error("distribution is not a pushforward");
  return *impl_->tau;
}

// ---------------------------------------------------------------------------
// Kernel

struct Kernel::Impl {
  KernelKind kind{};
  std::string name;
  KernelConstants constants;
  bool translation_invariant = false;
  double parameter = std::numeric_limits<double>::quiet_NaN();
  Matrix blocks;
  PointMatrix centers;

  virtual ~Impl() = default;
  virtual double eval(PointView x, PointView y) const = 0;
  virtual void row(PointView x, const PointMatrix& ys, std::span<double> out,
                   Eigen::Index begin) const {
    for (Eigen::Index j = begin; j < ys.rows(); ++j) out[j - begin] = eval(x, row_view(ys, j));
  }
  virtual std::optional<Vector> profile_gradient(PointView) const { return std::nullopt; }
};

namespace {

struct GaussianKernel final : Kernel::Impl {
  double inv2h2 = 0.0;
  double inv_h2 = 0.0;
  double eval(PointView x, PointView y) const override {
    return std::exp(-squared_distance(x, y) * inv2h2);
  }
  void row(PointView x, const PointMatrix& ys, std::span<double> out,
           Eigen::Index begin) const override {
    const std::size_t d = x.size();
    const double* base = ys.data();
    for (Eigen::Index j = begin; j < ys.rows(); ++j) {
      const double* y = base + j * d;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double t = x[k] - y[k];
        s += t * t;
      }
      out[j - begin] = std::exp(-s * inv2h2);
    }
  }
  std::optional<Vector> profile_gradient(PointView z) const override {
    const Vector v = to_vector(z);
    return (-inv_h2 * std::exp(-v.squaredNorm() * inv2h2) * v).eval();
  }
};

struct EpsilonKernel final : Kernel::Impl {
  double radius2 = 0.0;
  double eval(PointView x, PointView y) const override {
    return squared_distance(x, y) <= radius2 ? 1.0 : 0.0;
  }
  void row(PointView x, const PointMatrix& ys, std::span<double> out,
           Eigen::Index begin) const override {
    const std::size_t d = x.size();
    const double* base = ys.data();
    for (Eigen::Index j = begin; j < ys.rows(); ++j) {
      const double* y = base + j * d;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double t = x[k] - y[k];
        s += t * t;
      }
      out[j - begin] = s <= radius2 ? 1.0 : 0.0;
    }
  }
};

std::size_t nearest_center(const PointMatrix& centers, PointView x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = squared_distance(row_view(centers, c), x);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  return best;
}

struct SbmKernel final : Kernel::Impl {
  double eval(PointView x, PointView y) const override {
    const auto a = static_cast<Eigen::Index>(nearest_center(centers, x));
    const auto b = static_cast<Eigen::Index>(nearest_center(centers, y));
    return blocks(a, b);
  }
  void row(PointView x, const PointMatrix& ys, std::span<double> out,
           Eigen::Index begin) const override {
    const auto a = static_cast<Eigen::Index>(nearest_center(centers, x));
    for (Eigen::Index j = begin; j < ys.rows(); ++j) {
      out[j - begin] =
          blocks(a, static_cast<Eigen::Index>(nearest_center(centers, row_view(ys, j))));
    }
  }
};

struct ConstantKernel final : Kernel::Impl {
  double eval(PointView, PointView) const override { return parameter; }
  void row(PointView, const PointMatrix& ys, std::span<double> out,
           Eigen::Index begin) const override {
    std::fill(out.begin(), out.begin() + (ys.rows() - begin), parameter);
  }
  std::optional<Vector> profile_gradient(PointView z) const override {
    return Vector::Zero(static_cast<Eigen::Index>(z.size())).eval();
  }
};

struct CustomKernel final : Kernel::Impl {
  Kernel::Function fn;
  std::optional<Kernel::ProfileGradient> gradient;
  double eval(PointView x, PointView y) const override { return fn(x, y); }
  std::optional<Vector> profile_gradient(PointView z) const override {
    if (!gradient) return std::nullopt;
    return (*gradient)(z);
  }
};

void check_constants(const KernelConstants& c) {
  if (!(c.c_max > 0.0) || c.c_max > 1.0) throw ConfigError("kernel.c_max must lie in (0, 1]");
  if (!(c.c_min > 0.0) || c.c_min > c.c_max) {
    throw ConfigError("kernel.c_min must lie in (0, c_max]");
  }
  if (c.c_lip < 0.0) throw ConfigError("kernel.c_lip must be nonnegative");
  if (c.n_pieces < 1) throw ConfigError("kernel.n_pieces must be >= 1");
}

}  // namespace

Kernel Kernel::gaussian_rbf(double bandwidth, KernelConstants constants) {
  if (!(bandwidth > 0.0)) throw ConfigError("kernel.bandwidth must be positive");
  check_constants(constants);
  auto impl = std::make_shared<GaussianKernel>();
  impl->kind = KernelKind::GaussianRbf;
  impl->name = "gaussian-rbf";
  impl->constants = constants;
  impl->translation_invariant = true;
  impl->parameter = bandwidth;
  impl->inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  impl->inv_h2 = 1.0 / (bandwidth * bandwidth);
  return Kernel(std::move(impl), {});
}

Kernel Kernel::epsilon_threshold(double radius, KernelConstants constants) {
  if (!(radius > 0.0)) throw ConfigError("kernel.radius must be positive");
  check_constants(constants);
  auto impl = std::make_shared<EpsilonKernel>();
  impl->kind = KernelKind::EpsilonThreshold;
  impl->name = "epsilon-threshold";
  impl->constants = constants;
  impl->translation_invariant = true;
  impl->parameter = radius;
  impl->radius2 = radius * radius;
  return Kernel(std::move(impl), {});
}

Kernel Kernel::sbm_block(Matrix blocks, PointMatrix centers, KernelConstants constants) {
  if (blocks.rows() != blocks.cols() || blocks.rows() != centers.rows() || blocks.rows() == 0) {
    throw ConfigError("kernel.blocks must be square with one row per community center");
  }
  if (blocks != blocks.transpose()) throw ConfigError("kernel.blocks must be symmetric");
  if ((blocks.array() < 0.0).any() || (blocks.array() > 1.0).any()) {
    throw ConfigError("kernel.blocks entries must lie in [0, 1]");
  }
  check_constants(constants);
  auto impl = std::make_shared<SbmKernel>();
  impl->kind = KernelKind::SbmBlock;
  impl->name = "sbm-block";
  impl->constants = constants;
  impl->blocks = std::move(blocks);
  impl->centers = std::move(centers);
  return Kernel(std::move(impl), {});
}

Kernel Kernel::constant(double value, KernelConstants constants) {
  if (value < 0.0 || value > 1.0) throw ConfigError("kernel.value must lie in [0, 1]");
  if (constants.c_max < value) constants.c_max = value;
  // W == 0 has no positive degree floor; keep the bookkeeping well formed.
  if (value > 0.0) {
    check_constants(constants);
  }
  auto impl = std::make_shared<ConstantKernel>();
  impl->kind = KernelKind::Constant;
  impl->name = "constant";
  impl->constants = constants;
  impl->translation_invariant = true;
  impl->parameter = value;
  return Kernel(std::move(impl), {});
}

Kernel Kernel::custom(std::string name, Function fn, KernelConstants constants,
                      bool translation_invariant, std::optional<ProfileGradient> profile_gradient) {
  check_constants(constants);
  auto impl = std::make_shared<CustomKernel>();
  impl->kind = KernelKind::Custom;
  impl->name = std::move(name);
  impl->constants = constants;
  impl->translation_invariant = translation_invariant;
  impl->fn = std::move(fn);
  impl->gradient = std::move(profile_gradient);
  return Kernel(std::move(impl), {});
}

Kernel Kernel::deformed(const Deformation& tau) const {
  std::vector<Deformation> warps;
  warps.reserve(warps_.size() + 1);
  warps.push_back(tau);
  warps.insert(warps.end(), warps_.begin(), warps_.end());
  return Kernel(impl_, std::move(warps));
}

double Kernel::operator()(PointView x, PointView y) const {
  if (warps_.empty()) return impl_->eval(x, y);
  const Vector wx = warp_point(x);
  const Vector wy = warp_point(y);
  return impl_->eval(vector_view(wx), vector_view(wy));
}

PointMatrix Kernel::warp(const PointMatrix& points) const {
  PointMatrix out = points;
  for (const auto& tau : warps_) out = tau.apply_rows(out);
  return out;
}

Vector Kernel::warp_point(PointView x) const {
  Vector out = to_vector(x);
  for (const auto& tau : warps_) out = tau.apply(vector_view(out));
  return out;
}

double Kernel::eval_warped(PointView x, PointView y) const { return impl_->eval(x, y); }

void Kernel::row_warped(PointView x, const PointMatrix& ys, std::span<double> out,
                        Eigen::Index begin) const {
  if (static_cast<Eigen::Index>(out.size()) < ys.rows() - begin) {
    throw ShapeError("kernel row: output buffer too small");
  }
  impl_->row(x, ys, out, begin);
}

KernelKind Kernel::kind() const { return impl_->kind; }

std::string Kernel::kind_name() const {
  return warps_.empty() ? impl_->name : impl_->name + "(deformed)";
}

const KernelConstants& Kernel::constants() const { return impl_->constants; }

bool Kernel::translation_invariant() const {
  return impl_->translation_invariant &&
         std::all_of(warps_.begin(), warps_.end(),
                     [](const Deformation& t) { return t.is_constant(); });
}

bool Kernel::is_deformed() const { return !warps_.empty(); }

std::optional<Vector> Kernel::profile_gradient(PointView z) const {
  if (!translation_invariant()) return std::nullopt;
  return impl_->profile_gradient(z);
}

double Kernel::parameter() const { return impl_->parameter; }
const Matrix& Kernel::blocks() const { return impl_->blocks; }
const PointMatrix& Kernel::centers() const { return impl_->centers; }

std::size_t Kernel::community(PointView x) const {
  if (impl_->kind != KernelKind::SbmBlock) throw std::logic_error("kernel has no communities");
  const Vector w = warp_point(x);
  return nearest_center(impl_->centers, vector_view(w));
}

// ---------------------------------------------------------------------------
// SignalFunction

SignalFunction::SignalFunction(std::string name, int output_dimension, Evaluator evaluator,
                               double sup_norm_bound, SignalKind kind)
    : name_(std::move(name)),
      output_dimension_(output_dimension),
      evaluator_(std::move(evaluator)),
      sup_norm_bound_(sup_norm_bound),
      kind_(kind) {
  if (output_dimension_ < 1) throw ConfigError("signal: output dimension must be >= 1");
}

SignalFunction SignalFunction::constant(Vector value) {
  const double bound = value.norm();
  const int d = static_cast<int>(value.size());
  return SignalFunction(
      "constant", d, [value](PointView) { return value; }, bound, SignalKind::Constant);
}

SignalFunction SignalFunction::coordinate(int index, double sup_norm_bound) {
  if (index < 0) throw ConfigError("signal.index must be nonnegative");
  return SignalFunction(
      "coordinate", 1,
      [index](PointView x) {
        if (index >= static_cast<int>(x.size())) {
          throw ShapeError("signal: coordinate index exceeds point dimension");
        }
        return Vector::Constant(1, x[static_cast<std::size_t>(index)]).eval();
      },
      sup_norm_bound, SignalKind::Coordinate);
}

SignalFunction SignalFunction::degree(const Kernel& kernel, const NodeDistribution& distribution,
                                      std::size_t n_mc, std::uint64_t seed) {
  if (n_mc == 0) throw ConfigError("signal: degree estimate needs n_mc >= 1");
  PointMatrix sample(static_cast<Eigen::Index>(n_mc), distribution.dimension());
  for (std::size_t i = 0; i < n_mc; ++i) {
    sample.row(static_cast<Eigen::Index>(i)) = distribution.sample(seed, i);
  }
  auto warped = std::make_shared<const PointMatrix>(kernel.warp(sample));
  return SignalFunction(
      "degree", 1,
      [kernel, warped](PointView x) {
        const Vector wx = kernel.warp_point(x);
        std::vector<double> values(static_cast<std::size_t>(warped->rows()));
        kernel.row_warped(vector_view(wx), *warped, values);
        double s = 0.0;
        for (double v : values) s += v;
        return Vector::Constant(1, s / static_cast<double>(values.size())).eval();
      },
      kernel.constants().c_max, SignalKind::Degree);
}

SignalFunction SignalFunction::composed(const Deformation& tau) const {
  auto inner = evaluator_;
  return SignalFunction(
      name_ + "(deformed)", output_dimension_,
      [inner, tau](PointView x) {
        const Vector y = tau.apply(x);
        return inner(vector_view(y));
      },
      sup_norm_bound_, kind_);
}

Matrix SignalFunction::evaluate(const PointMatrix& points) const {
  Matrix out(points.rows(), output_dimension_);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vector v = evaluator_(row_view(points, i));
    if (v.size() != output_dimension_) throw ShapeError("signal: evaluator returned wrong size");
    out.row(i) = v.transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparsity and model

double SparsitySchedule::at(std::size_t n) const {
  const double nn = static_cast<double>(std::max<std::size_t>(n, 1));
  double alpha = 0.0;
  switch (kind) {
    case Kind::Constant: alpha = c; break;
    case Kind::LogOverN: alpha = std::min(1.0, c * std::log(nn) / nn); break;
    case Kind::Power: alpha = std::min(1.0, c / std::pow(nn, gamma)); break;
  }
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw ModelError("sparsity: alpha_n = " + std::to_string(alpha) + " outside (0, 1] at n = " +
                     std::to_string(n));
  }
  return alpha;
}

std::string SparsitySchedule::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Constant: os << "constant(" << c << ")"; break;
    case Kind::LogOverN: os << c << "*log(n)/n"; break;
    case Kind::Power: os << c << "/n^" << gamma; break;
  }
  return os.str();
}

void RandomGraphModel::validate() const {
  space.validate();
  if (distribution.dimension() != space.ambient_dimension) {
    throw ConfigError("distribution dimension does not match space.dimension");
  }
  if (!(sparsity.c > 0.0)) throw ConfigError("sparsity.c must be positive");
  if (sparsity.kind == SparsitySchedule::Kind::Constant && sparsity.c > 1.0) {
    throw ConfigError("sparsity.alpha must lie in (0, 1]");
  }
}

PointMatrix sample_latents(const RandomGraphModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_latents: n must be >= 1");
  PointMatrix out(static_cast<Eigen::Index>(n), model.distribution.dimension());
  for (std::size_t i = 0; i < n; ++i) {
    out.row(static_cast<Eigen::Index>(i)) = model.distribution.sample(seed, i);
  }
  return out;
}

double kernel_eval(const Kernel& kernel, PointView x, PointView y) { return kernel(x, y); }

Estimate estimate_degree_function(const RandomGraphModel& model, PointView x, std::size_t n_mc,
                                  std::uint64_t seed) {
  if (n_mc < 1) throw ConfigError("estimate_degree_function: n_mc must be >= 1");
  const PointMatrix ys = model.kernel.warp(sample_latents(model, n_mc, seed));
  const Vector wx = model.kernel.warp_point(x);
  std::vector<double> values(n_mc);
  model.kernel.row_warped(vector_view(wx), ys, values);
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n_mc);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = n_mc > 1 ? var / static_cast<double>(n_mc - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n_mc))};
}

Estimate signal_l2_norm(const RandomGraphModel& model, std::size_t n_mc, std::uint64_t seed) {
  const Matrix values = model.signal.evaluate(sample_latents(model, n_mc, seed));
  const Vector sq = values.rowwise().squaredNorm();
  const double mean = sq.mean();
  const double var =
      n_mc > 1 ? (sq.array() - mean).square().sum() / static_cast<double>(n_mc - 1) : 0.0;
  const double norm = std::sqrt(mean);
  const double se_mean = std::sqrt(var / static_cast<double>(n_mc));
  return {norm, norm > 0.0 ? se_mean / (2.0 * norm) : std::sqrt(se_mean)};
}

DeformTarget parse_deform_target(const std::string& name) {
  if (name == "kernel") return DeformTarget::Kernel;
  if (name == "distribution") return DeformTarget::Distribution;
  if (name == "signal") return DeformTarget::Signal;
  throw ConfigError("unknown deformation target '" + name + "'");
}

std::string to_string(DeformTarget target) {
  switch (target) {
    case DeformTarget::Kernel: return "kernel";
    case DeformTarget::Distribution: return "distribution";
    case DeformTarget::Signal: return "signal";
  }
  return "unknown";
}

void check_deformation_domain(const RandomGraphModel& model, const Deformation& tau,
                              std::size_t n_check, std::uint64_t seed) {
  if (tau.dimension() != model.space.ambient_dimension) {
    throw ConfigError("deformation dimension does not match space.dimension");
  }
  for (std::size_t i = 0; i < n_check; ++i) {
    const Vector x = model.distribution.sample(seed, i);
    const Vector y = tau.apply(vector_view(x));
    if (!model.space.contains(vector_view(y))) {
      std::ostringstream os;
      os << "deformation '" << tau.name() << "' (amplitude " << tau.amplitude()
         << ") maps a support point outside the latent space";
      throw DomainError(os.str());
    }
  }
}

RandomGraphModel deform_model(const RandomGraphModel& model, const Deformation& tau,
                              DeformTarget target) {
  if (tau.dimension() != model.space.ambient_dimension) {
    throw ConfigError("deformation dimension does not match space.dimension");
  }
  RandomGraphModel out = model;
  switch (target) {
    case DeformTarget::Kernel:
      out.kernel = model.kernel.deformed(tau);
      break;
    case DeformTarget::Distribution:
      check_deformation_domain(model, tau);
      out.distribution = NodeDistribution::pushforward(model.distribution, tau);
      break;
    case DeformTarget::Signal:
      out.signal = model.signal.composed(tau);
      break;
  }
  return out;
}

double spectral_norm_dense(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

DeformationSize deformation_size(const Deformation& tau, const RandomGraphModel& model,
                                 const DeformationSizeOptions& options) {
  if (options.n_mc < 1) throw ConfigError("deformation_size: n_mc must be >= 1");
  DeformationSize out;
  const PointMatrix xs = sample_latents(model, options.n_mc, options.seed);
  const int d = static_cast<int>(xs.cols());

  const bool lebesgue = model.distribution.is_uniform_full_dimensional() &&
                        model.space.intrinsic_dimension == model.space.ambient_dimension;
  const auto& declared = model.distribution.density_wrt_base();
  const bool have_density = declared.has_value() || lebesgue;
  if (!have_density && options.require_density) {
    throw UnsupportedEstimate(
        "N_P(tau) needs a declared density or a uniform full-dimensional distribution");
  }

  double n_p = 0.0;
  double q_max = 0.0;
  double q_inv_max = 0.0;
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const PointView x = row_view(xs, i);
    out.sup_tau = std::max(out.sup_tau, tau.displacement(x).norm());
    const Matrix jac = tau.jacobian(x);
    out.sup_grad_tau = std::max(out.sup_grad_tau, spectral_norm_dense(jac));
    if (have_density) {
      double q = 0.0;
      if (declared) {
        q = (*declared)(x);
      } else {
        q = 1.0 / (Matrix::Identity(d, d) - jac).determinant();
      }
      n_p = std::max(n_p, std::abs(q - 1.0));
      q_max = std::max(q_max, q);
      q_inv_max = std::max(q_inv_max, q > 0.0 ? 1.0 / q : std::numeric_limits<double>::infinity());
    }
  }
  if (have_density) {
    out.n_p_tau = n_p;
    out.c_p_tau = std::max(q_max, q_inv_max);
  }

  // Suprema over x of the A1 integrals, inner expectation over a fresh sample of P.
  const std::size_t n_outer = std::min<std::size_t>(options.n_outer, options.n_mc);
  const PointMatrix ys = sample_latents(model, options.n_mc, derive_seed(options.seed, 1));
  const PointMatrix ys_warped = model.kernel.warp(ys);
  std::vector<double> values(options.n_mc);
  double c_w = 0.0;
  double c_grad = 0.0;
  const bool ti = model.kernel.translation_invariant() &&
                  model.kernel.profile_gradient(vector_view(Vector::Zero(d).eval())).has_value();
  for (std::size_t i = 0; i < n_outer; ++i) {
    const PointView x = row_view(xs, static_cast<Eigen::Index>(i));
    const Vector wx = model.kernel.warp_point(x);
    model.kernel.row_warped(vector_view(wx), ys_warped, values);
    double s = 0.0;
    for (double v : values) s += std::abs(v);
    c_w = std::max(c_w, s / static_cast<double>(options.n_mc));
    if (ti) {
      const Vector xv = Eigen::Map<const Vector>(x.data(), d);
      double g = 0.0;
      for (Eigen::Index j = 0; j < ys.rows(); ++j) {
        const Vector diff = xv - ys.row(j).transpose();
        const Vector half = 0.5 * diff;
        g += model.kernel.profile_gradient(vector_view(half))->norm() * diff.norm();
      }
      c_grad = std::max(c_grad, g / static_cast<double>(options.n_mc));
    }
  }
  out.c_w = c_w;
  if (ti) out.c_grad_w = c_grad;
  return out;
}

}  // namespace rgcn
