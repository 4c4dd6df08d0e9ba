#pragma once

#include <cmath>
#include <concepts>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rgcn/common.hpp"
#include "rgcn/graph.hpp"

namespace rgcn {

/// Pointwise nonlinearities with |rho(x)| <= |x| and 1-Lipschitz.
enum class Activation { Relu, Abs, Tanh };

Activation parse_activation(const std::string& name);
std::string to_string(Activation activation);

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Abs: return x < 0.0 ? -x : x;
    case Activation::Tanh: return std::tanh(x);
  }
  return x;
}

void activate_inplace(Activation a, Matrix& m);

/// One propagation layer: filter coefficients B_0..B_K (each d_{l+1} x d_l) and bias.
struct GcnLayer {
  std::vector<Matrix> coefficients;
  Vector bias;
};

struct GcnParams {
  /// d_0 ... d_M.
  std::vector<int> widths;
  int order = 0;
  std::vector<GcnLayer> layers;
  /// theta, d_M x d_out.
  Matrix readout;
  Vector readout_bias;
  Activation activation = Activation::Relu;

  int layer_count() const { return static_cast<int>(layers.size()); }
  int input_dimension() const { return widths.front(); }
  int output_dimension() const { return static_cast<int>(readout.cols()); }
  bool has_bias() const;

  /// Throws ShapeError on an inconsistent width chain, ConfigError on non-finite values.
  void validate() const;

  /// Same network without any bias.
  GcnParams without_bias() const;
};

/// M = 0 network with theta = I and b = 0: the readout reproduces its input.
GcnParams identity_network(int width);

template <class Op>
concept LaplacianOperator = requires(const Op& op, const Matrix& m) {
  { op.matvec(m) } -> std::convertible_to<Matrix>;
  { op.size() } -> std::convertible_to<Eigen::Index>;
};

/// Sum_k L^k Z B_k^T via iterated products: exactly K operator applications.
/// When `powers` is given it receives L^k Z for k = 0..K-1.
template <LaplacianOperator Op>
Matrix apply_filter(std::span<const Matrix> coefficients, const Op& laplacian, const Matrix& z,
                    std::vector<Matrix>* powers = nullptr) {
  if (coefficients.empty()) throw ShapeError("apply_filter: need at least B_0");
  if (z.rows() != laplacian.size()) throw ShapeError("apply_filter: signal has wrong node count");
  for (const auto& b : coefficients) {
    if (b.cols() != z.cols() || b.rows() != coefficients.front().rows()) {
      throw ShapeError("apply_filter: coefficient shape does not match signal width");
    }
  }
  if (powers) powers->clear();
  Matrix v = z;
  Matrix out = v * coefficients[0].transpose();
  for (std::size_t k = 1; k < coefficients.size(); ++k) {
    Matrix next = laplacian.matvec(v);
    if (powers) powers->push_back(std::move(v));
    v = std::move(next);
    out.noalias() += v * coefficients[k].transpose();
  }
  return out;
}

/// Per-layer state kept for out-of-sample extension: layer input and its powers.
struct LayerTrace {
  Matrix input;
  std::vector<Matrix> powers;
};

/// Runs the M propagation layers and returns Z^(M). `trace` receives one entry per layer.
template <LaplacianOperator Op>
Matrix propagate(const GcnParams& params, const Op& laplacian, const Matrix& z,
                 std::vector<LayerTrace>* trace = nullptr) {
  if (z.cols() != params.input_dimension()) {
    throw ShapeError("forward: input has " + std::to_string(z.cols()) + " columns, expected " +
                     std::to_string(params.input_dimension()));
  }
  if (trace) trace->clear();
  Matrix current = z;
  for (const auto& layer : params.layers) {
    LayerTrace entry;
    Matrix next = apply_filter(std::span<const Matrix>(layer.coefficients), laplacian, current,
                               trace ? &entry.powers : nullptr);
    next.rowwise() += layer.bias.transpose();
    activate_inplace(params.activation, next);
    if (trace) {
      entry.input = std::move(current);
      trace->push_back(std::move(entry));
    }
    current = std::move(next);
  }
  return current;
}

/// Z^(M) theta + 1 b^T.
Matrix readout(const GcnParams& params, const Matrix& last_layer);

template <LaplacianOperator Op>
Matrix forward_equivariant(const GcnParams& params, const Op& laplacian, const Matrix& z) {
  return readout(params, propagate(params, laplacian, z));
}

Matrix forward_equivariant(const GcnParams& params, const SampledGraph& graph, const Matrix& z);

/// Mean over nodes of the equivariant output.
Vector forward_invariant(const GcnParams& params, const SampledGraph& graph, const Matrix& z);
Vector forward_invariant(const GcnParams& params, const NormalizedLaplacian& laplacian,
                         const Matrix& z);

struct InitPolicy {
  enum class Scale { Plain, UnitH2 };
  Scale scale_policy = Scale::Plain;
  double scale = 1.0;
  double bias_std = 0.0;
  int output_dimension = 1;
  Activation activation = Activation::Relu;
};

InitPolicy::Scale parse_scale_policy(const std::string& name);

/// Coefficients i.i.d. N(0, (scale / (sqrt(d_l) (K+1)))^2); readout N(0, scale^2 / d_M).
/// With UnitH2 each layer is rescaled so that sum_k ||B_k|| = 1.
GcnParams random_init(const std::vector<int>& widths, int order, std::uint64_t seed,
                      const InitPolicy& policy = {});

struct NoisyForward {
  Matrix input;
  Matrix equivariant;
  Vector invariant;
};

/// Input z_i = f(x_i) + nu_i with nu i.i.d. N(0, noise_std^2); with presmooth the
/// network receives L Z instead of Z.
NoisyForward forward_with_noise(const GcnParams& params, const SampledGraph& graph,
                                double noise_std, bool presmooth, std::uint64_t seed);

/// Versioned text format, bit-exact at double precision.
std::string params_to_text(const GcnParams& params);
GcnParams params_from_text(const std::string& text);
void save_params(const GcnParams& params, const std::filesystem::path& path);
GcnParams load_params(const std::filesystem::path& path);

}  // namespace rgcn
