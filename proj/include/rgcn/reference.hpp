#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "rgcn/common.hpp"
#include "rgcn/gcn.hpp"
#include "rgcn/model.hpp"

namespace rgcn {

struct ReferenceOptions {
  /// Allocate exact component counts (largest remainder) for mixture distributions.
  bool stratify_mixture = true;
  /// Above this size the operator re-evaluates kernel rows on every application.
  Eigen::Index dense_cap = 8192;
};

/// Empirical normalized-Laplacian operator on a weighted reference sample:
///   (L v)(x) = sum_j w_j W(x, x_j) / sqrt(d(x) d(x_j)) v_j,  d(x) = sum_j w_j W(x, x_j).
/// Monte-Carlo references use w_j = 1/n_ref; the 1-D quadrature backend uses trapezoid
/// weights. Immutable after construction.
class ReferenceOperator {
 public:
  ReferenceOperator(const Kernel& kernel, PointMatrix points, Vector weights, double c_min,
                    Eigen::Index dense_cap = ReferenceOptions{}.dense_cap);

  Eigen::Index size() const { return points_.rows(); }
  const PointMatrix& latents() const { return points_; }
  const Vector& weights() const { return weights_; }
  const Vector& degrees() const { return degrees_; }
  const Kernel& kernel() const { return kernel_; }
  double degree_floor() const { return degree_floor_; }
  bool is_dense() const { return dense_.has_value(); }

  Matrix matvec(const Matrix& v) const;

  /// Row of the operator at an arbitrary point: entries w_j W(x, x_j) / sqrt(d(x) d_j).
  /// Throws SamplingFailure when d(x) falls below c_min / 2.
  Vector query_row(PointView x, double* degree = nullptr) const;

  /// Weighted mean over reference points (the pooling integral).
  Vector integrate(const Matrix& values) const;

 private:
  void fill_row(Eigen::Index i, std::span<double> buffer) const;

  Kernel kernel_;
  PointMatrix points_;
  PointMatrix warped_;
  Vector weights_;
  Vector degrees_;
  Vector inv_sqrt_degrees_;
  double degree_floor_;
  std::optional<Matrix> dense_;
};

ReferenceOperator build_reference(const RandomGraphModel& model, std::size_t n_ref,
                                  std::uint64_t seed, const ReferenceOptions& options = {});

/// Deterministic trapezoid grid for 1-D uniform models.
ReferenceOperator build_quadrature_reference(const RandomGraphModel& model, std::size_t grid_size);

struct CgcnResult {
  /// f at the reference points.
  Matrix input;
  /// n_ref x d_out values of Phi_{W,P}(f).
  Matrix equivariant;
  /// Pooled output.
  Vector invariant;
  std::vector<LayerTrace> trace;
};

CgcnResult cgcn_forward(const GcnParams& params, const ReferenceOperator& reference,
                        const SignalFunction& signal);

/// Out-of-sample (Nystrom) extension of the c-GCN output to query points.
Matrix evaluate_at(const ReferenceOperator& reference, const GcnParams& params,
                   const SignalFunction& signal, const PointMatrix& queries,
                   const CgcnResult* forward = nullptr);

/// CSV: point coordinates x0.., then output values y0..
void write_reference_csv(const ReferenceOperator& reference, const CgcnResult& result,
                         const std::filesystem::path& path);

}  // namespace rgcn
