#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgcn/common.hpp"

namespace rgcn {

/// Latent space X as a declared bounding box in R^d. The metric is the Euclidean
/// one rescaled by 1/diameter(), so the rescaled diameter is at most 1.
struct LatentSpace {
  int ambient_dimension = 1;
  int intrinsic_dimension = 1;
  Vector lower;
  Vector upper;
  std::string description;

  static LatentSpace box(Vector lower, Vector upper, int intrinsic_dimension,
                         std::string description);

  double diameter() const;
  bool contains(PointView x, double tol = 1e-12) const;
  void validate() const;
};

/// Spatial deformation tau = t * tau_base. The model is deformed through Id - tau.
class Deformation {
 public:
  using Map = std::function<Vector(PointView)>;
  using JacobianMap = std::function<Matrix(PointView)>;

  static constexpr double kFiniteDifferenceStep = 1e-5;

  Deformation(std::string name, int dimension, Map base, std::optional<JacobianMap> jacobian,
              double amplitude = 1.0, bool constant = false);

  static Deformation zero(int dimension);
  /// tau(x) = t * shift.
  static Deformation translation(Vector shift, double amplitude = 1.0);
  /// tau(x) = t * x.
  static Deformation scaling(int dimension, double amplitude);
  /// tau(x) = t * (x - c) * exp(-|x - c|^2 / (2 s^2)); Id - tau contracts toward c.
  static Deformation gaussian_bump(Vector center, double width, double amplitude);

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  double amplitude() const { return amplitude_; }
  bool is_constant() const { return constant_; }
  bool has_analytic_jacobian() const { return jacobian_.has_value(); }
  Deformation with_amplitude(double amplitude) const;

  /// tau(x).
  Vector displacement(PointView x) const;
  /// (Id - tau)(x).
  Vector apply(PointView x) const;
  PointMatrix apply_rows(const PointMatrix& points) const;
  /// Jacobian of tau (not of Id - tau); central differences when no analytic form.
  Matrix jacobian(PointView x) const;

 private:
  std::string name_;
  int dimension_;
  Map base_;
  std::optional<JacobianMap> jacobian_;
  double amplitude_;
  bool constant_;
};

enum class DistributionKind { UniformCube, ParametricSurface, FiniteMixture, Pushforward };

class NodeDistribution {
 public:
  using Density = std::function<double(PointView)>;

  static NodeDistribution uniform_cube(Vector lower, Vector upper);
  /// (u, v, a sin(2 pi u) sin(2 pi v)), (u, v) uniform on [0,1]^2.
  static NodeDistribution bumped_surface(double amplitude);
  /// Component c with probability weights[c], then center_c + spread * U[-1,1]^d.
  static NodeDistribution finite_mixture(std::vector<double> weights, PointMatrix centers,
                                         double spread);
  /// Law of (Id - tau)(x), x ~ base.
  static NodeDistribution pushforward(const NodeDistribution& base, const Deformation& tau,
                                      std::optional<Density> density_wrt_base = std::nullopt);

  DistributionKind kind() const;
  std::string kind_name() const;
  int dimension() const;

  /// Deterministic in (seed, index).
  Vector sample(std::uint64_t seed, std::uint64_t index) const;

  /// Mixture structure, looking through pushforwards. Empty for non-mixtures.
  std::vector<double> mixture_weights() const;
  /// Draw conditioned on a mixture component (stratified sampling).
  Vector sample_component(std::size_t component, std::uint64_t seed, std::uint64_t index) const;

  const std::optional<Density>& density_wrt_base() const;
  /// Uniform cube whose dimension equals the space dimension (Lebesgue case).
  bool is_uniform_full_dimensional() const;
  /// Parameters, for config round-trips and diagnostics.
  const Vector& lower() const;
  const Vector& upper() const;
  double surface_amplitude() const;
  const PointMatrix& centers() const;
  double spread() const;
  /// Base distribution and deformation of a pushforward.
  const NodeDistribution& base() const;
  const Deformation& map() const;

 private:
  struct Impl;
  explicit NodeDistribution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Declared constants of the model assumption: |W| <= c_max, d_{W,P} >= c_min,
/// W(., x) piecewise (c_lip, n_pieces)-Lipschitz. Bookkeeping only, not verified.
struct KernelConstants {
  double c_max = 1.0;
  double c_min = 1.0;
  double c_lip = 0.0;
  int n_pieces = 1;
};

enum class KernelKind { GaussianRbf, EpsilonThreshold, SbmBlock, Constant, Custom };

class Kernel {
 public:
  using Function = std::function<double(PointView, PointView)>;
  using ProfileGradient = std::function<Vector(PointView)>;

  static Kernel gaussian_rbf(double bandwidth, KernelConstants constants);
  static Kernel epsilon_threshold(double radius, KernelConstants constants);
  /// Community of a point is its nearest center.
  static Kernel sbm_block(Matrix blocks, PointMatrix centers, KernelConstants constants);
  static Kernel constant(double value, KernelConstants constants);
  static Kernel custom(std::string name, Function fn, KernelConstants constants,
                       bool translation_invariant = false,
                       std::optional<ProfileGradient> profile_gradient = std::nullopt);

  /// W_tau(x, y) = W((Id - tau) x, (Id - tau) y).
  Kernel deformed(const Deformation& tau) const;

  double operator()(PointView x, PointView y) const;

  /// Applies all latent warps of a deformed kernel. Bulk callers warp once and use
  /// the *_warped entry points, which evaluate the undeformed base kernel.
  PointMatrix warp(const PointMatrix& points) const;
  Vector warp_point(PointView x) const;
  double eval_warped(PointView x, PointView y) const;
  /// Values W(x, ys[j]) for j in [begin, ys.rows()), written to out[0..].
  void row_warped(PointView x, const PointMatrix& ys, std::span<double> out,
                  Eigen::Index begin = 0) const;

  KernelKind kind() const;
  std::string kind_name() const;
  const KernelConstants& constants() const;
  bool translation_invariant() const;
  bool is_deformed() const;
  /// Gradient of the profile w in W(x, y) = w(x - y); only for translation-invariant kinds
  /// with a smooth profile.
  std::optional<Vector> profile_gradient(PointView z) const;
  /// Kind parameters (bandwidth, radius, constant value); NaN when not applicable.
  double parameter() const;
  const Matrix& blocks() const;
  const PointMatrix& centers() const;
  std::size_t community(PointView x) const;

  /// Kind-specific evaluation, defined in the implementation file.
  struct Impl;

 private:
  Kernel(std::shared_ptr<const Impl> impl, std::vector<Deformation> warps)
      : impl_(std::move(impl)), warps_(std::move(warps)) {}
  std::shared_ptr<const Impl> impl_;
  /// Applied front to back.
  std::vector<Deformation> warps_;
};

enum class SignalKind { Constant, Coordinate, Degree, Custom };

class SignalFunction {
 public:
  using Evaluator = std::function<Vector(PointView)>;

  SignalFunction(std::string name, int output_dimension, Evaluator evaluator,
                 double sup_norm_bound, SignalKind kind = SignalKind::Custom);

  static SignalFunction constant(Vector value);
  /// f(x) = x_k.
  static SignalFunction coordinate(int index, double sup_norm_bound);
  /// Degree function d_{W,P}, estimated on a fixed Monte-Carlo sample of P.
  static SignalFunction degree(const Kernel& kernel, const NodeDistribution& distribution,
                               std::size_t n_mc, std::uint64_t seed);

  /// f o (Id - tau).
  SignalFunction composed(const Deformation& tau) const;

  const std::string& name() const { return name_; }
  SignalKind kind() const { return kind_; }
  int output_dimension() const { return output_dimension_; }
  double sup_norm_bound() const { return sup_norm_bound_; }
  Vector operator()(PointView x) const { return evaluator_(x); }
  /// n x d_z matrix of values at the given points.
  Matrix evaluate(const PointMatrix& points) const;

 private:
  std::string name_;
  int output_dimension_;
  Evaluator evaluator_;
  double sup_norm_bound_;
  SignalKind kind_;
};

struct SparsitySchedule {
  enum class Kind { Constant, LogOverN, Power };
  Kind kind = Kind::Constant;
  double c = 1.0;
  double gamma = 0.0;

  static SparsitySchedule constant(double alpha) { return {Kind::Constant, alpha, 0.0}; }
  /// c log(n) / n, capped at 1.
  static SparsitySchedule log_over_n(double c) { return {Kind::LogOverN, c, 0.0}; }
  /// c / n^gamma, capped at 1.
  static SparsitySchedule power(double c, double gamma) { return {Kind::Power, c, gamma}; }

  double at(std::size_t n) const;
  std::string describe() const;
};

struct RandomGraphModel {
  std::string name;
  LatentSpace space;
  NodeDistribution distribution;
  Kernel kernel;
  SignalFunction signal;
  SparsitySchedule sparsity;

  void validate() const;
};

PointMatrix sample_latents(const RandomGraphModel& model, std::size_t n, std::uint64_t seed);

double kernel_eval(const Kernel& kernel, PointView x, PointView y);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo estimate of d_{W,P}(x) = E_{y~P} W(x, y).
Estimate estimate_degree_function(const RandomGraphModel& model, PointView x, std::size_t n_mc,
                                  std::uint64_t seed);

/// L2(P) norm of the model signal by Monte Carlo, with delta-method standard error.
Estimate signal_l2_norm(const RandomGraphModel& model, std::size_t n_mc, std::uint64_t seed);

enum class DeformTarget { Kernel, Distribution, Signal };
DeformTarget parse_deform_target(const std::string& name);
std::string to_string(DeformTarget target);

/// Throws DomainError when (Id - tau) maps a sampled support point outside the space.
void check_deformation_domain(const RandomGraphModel& model, const Deformation& tau,
                              std::size_t n_check = 2000, std::uint64_t seed = 0x5eed);

RandomGraphModel deform_model(const RandomGraphModel& model, const Deformation& tau,
                              DeformTarget target);

struct DeformationSizeOptions {
  std::size_t n_mc = 10000;
  /// Outer sample size for the suprema over x of the A1 integrals.
  std::size_t n_outer = 200;
  std::uint64_t seed = 7;
  /// Throw UnsupportedEstimate when N_P(tau) has no valid estimator.
  bool require_density = false;
};

struct DeformationSize {
  double sup_tau = 0.0;
  double sup_grad_tau = 0.0;
  std::optional<double> n_p_tau;
  std::optional<double> c_p_tau;
  std::optional<double> c_w;
  std::optional<double> c_grad_w;
};

DeformationSize deformation_size(const Deformation& tau, const RandomGraphModel& model,
                                 const DeformationSizeOptions& options = {});

/// Largest singular value of a small dense matrix.
double spectral_norm_dense(const Matrix& m);

}  // namespace rgcn
