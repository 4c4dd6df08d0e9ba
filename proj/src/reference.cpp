#include "rgcn/reference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rgcn/text_io.hpp"

namespace rgcn {

ReferenceOperator::ReferenceOperator(const Kernel& kernel, PointMatrix points, Vector weights,
                                     double c_min, Eigen::Index dense_cap)
    : kernel_(kernel),
      points_(std::move(points)),
      weights_(std::move(weights)),
      degree_floor_(0.5 * c_min) {
  const Eigen::Index n = points_.rows();
  if (n < 1) throw ConfigError("reference: need at least one point");
  if (weights_.size() != n) throw ShapeError("reference: one weight per point");
  warped_ = kernel_.warp(points_);

  degrees_.resize(n);
  std::vector<double> buffer(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    kernel_.row_warped(row_view(warped_, i), warped_, buffer);
    double d = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) d += weights_[j] * buffer[static_cast<std::size_t>(j)];
    degrees_[i] = d;
  }
  Eigen::Index worst = 0;
  const double min_degree = degrees_.minCoeff(&worst);
  if (min_degree < degree_floor_) {
    std::ostringstream os;
    os << "reference degree floor violated: min empirical degree " << min_degree << " at point "
       << worst << " is below c_min/2 = " << degree_floor_ << " (n_ref = " << n << ")";
    throw SamplingFailure(os.str());
  }
  inv_sqrt_degrees_ = degrees_.cwiseSqrt().cwiseInverse();

  if (n <= dense_cap) {
    Matrix dense(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      fill_row(i, buffer);
      dense.row(i) = Eigen::Map<const Vector>(buffer.data(), n).transpose();
    }
    dense_ = std::move(dense);
  }
}

void ReferenceOperator::fill_row(Eigen::Index i, std::span<double> buffer) const {
  const Eigen::Index n = size();
  kernel_.row_warped(row_view(warped_, i), warped_, buffer);
  const double scale = inv_sqrt_degrees_[i];
  for (Eigen::Index j = 0; j < n; ++j) {
    buffer[static_cast<std::size_t>(j)] *= weights_[j] * scale * inv_sqrt_degrees_[j];
  }
}

Matrix ReferenceOperator::matvec(const Matrix& v) const {
  if (v.rows() != size()) throw ShapeError("reference matvec: operand has wrong row count");
  if (dense_) return (*dense_) * v;
  const Eigen::Index n = size();
  Matrix out(n, v.cols());
  std::vector<double> buffer(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    fill_row(i, buffer);
    out.row(i) = Eigen::Map<const Vector>(buffer.data(), n).transpose() * v;
  }
  return out;
}

Vector ReferenceOperator::query_row(PointView x, double* degree) const {
  const Eigen::Index n = size();
  const Vector wx = kernel_.warp_point(x);
  Vector row(n);
  kernel_.row_warped(vector_view(wx), warped_, std::span<double>(row.data(), row.size()));
  row.array() *= weights_.array();
  const double d = row.sum();
  if (degree) *degree = d;
  if (d < degree_floor_) {
    std::ostringstream os;
    os << "extension failed: query degree " << d << " below c_min/2 = " << degree_floor_;
    throw SamplingFailure(os.str());
  }
  row.array() *= inv_sqrt_degrees_.array() / std::sqrt(d);
  return row;
}

Vector ReferenceOperator::integrate(const Matrix& values) const {
  if (values.rows() != size()) throw ShapeError("reference integrate: wrong row count");
  return values.transpose() * weights_;
}

ReferenceOperator build_reference(const RandomGraphModel& model, std::size_t n_ref,
                                  std::uint64_t seed, const ReferenceOptions& options) {
  if (n_ref < 1) throw ConfigError("build_reference: n_ref must be >= 1");
  PointMatrix points(static_cast<Eigen::Index>(n_ref), model.distribution.dimension());
  Vector w = Vector::Constant(static_cast<Eigen::Index>(n_ref), 1.0 / static_cast<double>(n_ref));
  const auto weights = model.distribution.mixture_weights();
  if (options.stratify_mixture && !weights.empty()) {
    // Largest-remainder allocation of exact component counts.
    std::vector<std::size_t> counts(weights.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
      const double exact = weights[c] * static_cast<double>(n_ref);
      counts[c] = static_cast<std::size_t>(std::floor(exact));
      assigned += counts[c];
      remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n_ref; ++r, ++assigned) ++counts[remainders[r].second];
    std::size_t index = 0;
    // Each stratum carries exactly its mixture weight.
    for (std::size_t c = 0; c < counts.size(); ++c) {
      for (std::size_t k = 0; k < counts[c]; ++k, ++index) {
        points.row(static_cast<Eigen::Index>(index)) =
            model.distribution.sample_component(c, seed, index);
        w(static_cast<Eigen::Index>(index)) = weights[c] / static_cast<double>(counts[c]);
      }
    }
  } else {
    points = sample_latents(model, n_ref, seed);
  }
  return ReferenceOperator(model.kernel, std::move(points), w, model.kernel.constants().c_min,
                           options.dense_cap);
}

ReferenceOperator build_quadrature_reference(const RandomGraphModel& model, std::size_t grid_size) {
  const auto& dist = model.distribution;
  if (dist.kind() != DistributionKind::UniformCube || dist.dimension() != 1) {
    throw UnsupportedEstimate("quadrature reference needs a 1-D uniform distribution");
  }
  if (grid_size < 2) throw ConfigError("quadrature reference: grid_size must be >= 2");
  const double a = dist.lower()[0];
  const double b = dist.upper()[0];
  const auto n = static_cast<Eigen::Index>(grid_size);
  PointMatrix points(n, 1);
  Vector weights(n);
  const double h = 1.0 / static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    points(i, 0) = a + (b - a) * static_cast<double>(i) * h;
    weights[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
  }
  return ReferenceOperator(model.kernel, std::move(points), weights, model.kernel.constants().c_min);
}

CgcnResult cgcn_forward(const GcnParams& params, const ReferenceOperator& reference,
                        const SignalFunction& signal) {
  params.validate();
  if (signal.output_dimension() != params.input_dimension()) {
    throw ShapeError("cgcn_forward: signal dimension does not match d_0");
  }
  CgcnResult out;
  out.input = signal.evaluate(reference.latents());
  const Matrix last = propagate(params, reference, out.input, &out.trace);
  out.equivariant = readout(params, last);
  out.invariant = reference.integrate(out.equivariant);
  return out;
}

Matrix evaluate_at(const ReferenceOperator& reference, const GcnParams& params,
                   const SignalFunction& signal, const PointMatrix& queries,
                   const CgcnResult* forward) {
  std::optional<CgcnResult> own;
  if (!forward) {
    own = cgcn_forward(params, reference, signal);
    forward = &*own;
  }
  if (forward->trace.size() != params.layers.size()) {
    throw ShapeError("evaluate_at: forward trace does not match the network");
  }
  constexpr Eigen::Index kBlock = 256;
  const Eigen::Index m = queries.rows();
  const Eigen::Index n = reference.size();
  Matrix out(m, params.output_dimension());
  for (Eigen::Index start = 0; start < m; start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, m - start);
    Matrix operator_rows(rows, n);
    Matrix h(rows, params.input_dimension());
    for (Eigen::Index r = 0; r < rows; ++r) {
      const PointView x = row_view(queries, start + r);
      operator_rows.row(r) = reference.query_row(x).transpose();
      h.row(r) = signal(x).transpose();
    }
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      const auto& layer = params.layers[l];
      const auto& powers = forward->trace[l].powers;
      Matrix next = h * layer.coefficients[0].transpose();
      for (std::size_t k = 1; k < layer.coefficients.size(); ++k) {
        next.noalias() += (operator_rows * powers[k - 1]) * layer.coefficients[k].transpose();
      }
      next.rowwise() += layer.bias.transpose();
      activate_inplace(params.activation, next);
      h = std::move(next);
    }
    out.middleRows(start, rows) = readout(params, h);
  }
  return out;
}

void write_reference_csv(const ReferenceOperator& reference, const CgcnResult& result,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto& pts = reference.latents();
  std::string sep;
  for (Eigen::Index k = 0; k < pts.cols(); ++k, sep = ",") out << sep << 'x' << k;
  for (Eigen::Index k = 0; k < result.equivariant.cols(); ++k, sep = ",") out << sep << 'y' << k;
  out << '\n';
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    sep.clear();
    for (Eigen::Index k = 0; k < pts.cols(); ++k, sep = ",") out << sep << format_double(pts(i, k));
    for (Eigen::Index k = 0; k < result.equivariant.cols(); ++k, sep = ",") {
      out << sep << format_double(result.equivariant(i, k));
    }
    out << '\n';
  }
}

}  // namespace rgcn
