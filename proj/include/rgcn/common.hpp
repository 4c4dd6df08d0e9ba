#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace rgcn {

/// Latent points, one per row. Row-major so a point is a contiguous span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using PointView = std::span<const double>;

inline PointView row_view(const PointMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline PointView vector_view(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Error taxonomy. The CLI maps ConfigError to exit code 2 and
// NumericalPrecondition (and subclasses) to exit code 3.

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalPrecondition : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Id - tau leaves the latent space.
struct DomainError : NumericalPrecondition {
  using NumericalPrecondition::NumericalPrecondition;
};

/// alpha_n * W exceeds 1, or another generative contract is broken.
struct ModelError : NumericalPrecondition {
  using NumericalPrecondition::NumericalPrecondition;
};

/// A sample violates a degree floor (reference build or query extension).
struct SamplingFailure : NumericalPrecondition {
  using NumericalPrecondition::NumericalPrecondition;
};

/// A requested estimate has no valid estimator for the given model.
struct UnsupportedEstimate : std::logic_error {
  using std::logic_error::logic_error;
};

struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

}  // namespace rgcn
