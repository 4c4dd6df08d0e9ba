#include "rgcn/gcn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rgcn/rng.hpp"
#include "rgcn/text_io.hpp"

namespace rgcn {

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "abs") return Activation::Abs;
  if (name == "tanh") return Activation::Tanh;
  throw ConfigError("activation '" + name + "' is not one of relu, abs, tanh");
}

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::Relu: return "relu";
    case Activation::Abs: return "abs";
    case Activation::Tanh: return "tanh";
  }
  return "unknown";
}

void activate_inplace(Activation a, Matrix& m) {
  switch (a) {
    case Activation::Relu: m = m.cwiseMax(0.0); break;
    case Activation::Abs: m = m.cwiseAbs(); break;
    case Activation::Tanh: m = m.array().tanh().matrix(); break;
  }
}

bool GcnParams::has_bias() const {
  if (readout_bias.size() > 0 && readout_bias.cwiseAbs().maxCoeff() > 0.0) return true;
  for (const auto& layer : layers) {
    if (layer.bias.size() > 0 && layer.bias.cwiseAbs().maxCoeff() > 0.0) return true;
  }
  return false;
}

void GcnParams::validate() const {
  if (widths.empty()) throw ShapeError("params: empty width chain");
  for (int w : widths) {
    if (w < 1) throw ShapeError("params: widths must be positive");
  }
  if (order < 0) throw ShapeError("params: order must be >= 0");
  if (layers.size() + 1 != widths.size()) {
    throw ShapeError("params: layer count does not match width chain");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.coefficients.size() != static_cast<std::size_t>(order) + 1) {
      throw ShapeError("params: layer " + std::to_string(l) + " does not have K+1 coefficients");
    }
    for (const auto& b : layer.coefficients) {
      if (b.rows() != widths[l + 1] || b.cols() != widths[l]) {
        throw ShapeError("params: coefficient shape mismatch at layer " + std::to_string(l));
      }
      if (!b.allFinite()) throw ConfigError("params: non-finite filter coefficient");
    }
    if (layer.bias.size() != widths[l + 1]) {
      throw ShapeError("params: bias size mismatch at layer " + std::to_string(l));
    }
    if (!layer.bias.allFinite()) throw ConfigError("params: non-finite bias");
  }
  if (readout.rows() != widths.back() || readout.cols() < 1) {
    throw ShapeError("params: readout must be d_M x d_out");
  }
  if (readout_bias.size() != readout.cols()) throw ShapeError("params: readout bias size");
  if (!readout.allFinite() || !readout_bias.allFinite()) {
    throw ConfigError("params: non-finite readout");
  }
}

GcnParams GcnParams::without_bias() const {
  GcnParams out = *this;
  for (auto& layer : out.layers) layer.bias.setZero();
  out.readout_bias.setZero();
  return out;
}

GcnParams identity_network(int width) {
  GcnParams p;
  p.widths = {width};
  p.order = 0;
  p.readout = Matrix::Identity(width, width);
  p.readout_bias = Vector::Zero(width);
  return p;
}

Matrix readout(const GcnParams& params, const Matrix& last_layer) {
  Matrix out = last_layer * params.readout;
  out.rowwise() += params.readout_bias.transpose();
  return out;
}

Matrix forward_equivariant(const GcnParams& params, const SampledGraph& graph, const Matrix& z) {
  return forward_equivariant(params, build_laplacian(graph), z);
}

Vector forward_invariant(const GcnParams& params, const NormalizedLaplacian& laplacian,
                         const Matrix& z) {
  const Matrix out = forward_equivariant(params, laplacian, z);
  return out.colwise().mean().transpose();
}

Vector forward_invariant(const GcnParams& params, const SampledGraph& graph, const Matrix& z) {
  return forward_invariant(params, build_laplacian(graph), z);
}

InitPolicy::Scale parse_scale_policy(const std::string& name) {
  if (name == "plain") return InitPolicy::Scale::Plain;
  if (name == "unit-H2") return InitPolicy::Scale::UnitH2;
  throw ConfigError("scale policy '" + name + "' is not one of plain, unit-H2");
}

GcnParams random_init(const std::vector<int>& widths, int order, std::uint64_t seed,
                      const InitPolicy& policy) {
  if (widths.empty()) throw ShapeError("random_init: empty width chain");
  if (order < 0) throw ShapeError("random_init: order must be >= 0");
  for (int w : widths) {
    if (w < 1) throw ShapeError("random_init: widths must be positive");
  }
  if (policy.output_dimension < 1) throw ShapeError("random_init: output dimension must be >= 1");

  GcnParams p;
  p.widths = widths;
  p.order = order;
  p.activation = policy.activation;
  const std::size_t m = widths.size() - 1;
  for (std::size_t l = 0; l < m; ++l) {
    CounterRng rng(derive_seed(seed, 0xc0ef, l));
    const double std_dev =
        policy.scale / (std::sqrt(static_cast<double>(widths[l])) * static_cast<double>(order + 1));
    GcnLayer layer;
    for (int k = 0; k <= order; ++k) {
      Matrix b(widths[l + 1], widths[l]);
      for (Eigen::Index j = 0; j < b.rows(); ++j) {
        for (Eigen::Index i = 0; i < b.cols(); ++i) b(j, i) = std_dev * rng.normal();
      }
      layer.coefficients.push_back(std::move(b));
    }
    if (policy.scale_policy == InitPolicy::Scale::UnitH2) {
      double h2 = 0.0;
      for (const auto& b : layer.coefficients) h2 += spectral_norm_dense(b);
      if (h2 > 0.0) {
        for (auto& b : layer.coefficients) b /= h2;
      }
    }
    layer.bias = Vector::Zero(widths[l + 1]);
    if (policy.bias_std > 0.0) {
      CounterRng bias_rng(derive_seed(seed, 0xb1a5, l));
      for (Eigen::Index j = 0; j < layer.bias.size(); ++j) {
        layer.bias[j] = policy.bias_std * bias_rng.normal();
      }
    }
    p.layers.push_back(std::move(layer));
  }
  CounterRng rng(derive_seed(seed, 0x7ea0));
  p.readout = Matrix(widths.back(), policy.output_dimension);
  const double readout_std = policy.scale / std::sqrt(static_cast<double>(widths.back()));
  for (Eigen::Index r = 0; r < p.readout.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.readout.cols(); ++c) p.readout(r, c) = readout_std * rng.normal();
  }
  p.readout_bias = Vector::Zero(policy.output_dimension);
  return p;
}

NoisyForward forward_with_noise(const GcnParams& params, const SampledGraph& graph,
                                double noise_std, bool presmooth, std::uint64_t seed) {
  if (noise_std < 0.0) throw ConfigError("forward_with_noise: noise_std must be >= 0");
  NoisyForward out;
  out.input = graph.signals;
  if (noise_std > 0.0) {
    for (Eigen::Index i = 0; i < out.input.rows(); ++i) {
      CounterRng rng(derive_seed(seed, 0x4015e, i));
      for (Eigen::Index k = 0; k < out.input.cols(); ++k) out.input(i, k) += noise_std * rng.normal();
    }
  }
  const NormalizedLaplacian laplacian = build_laplacian(graph);
  if (presmooth) out.input = laplacian.matvec(out.input);
  out.equivariant = forward_equivariant(params, laplacian, out.input);
  out.invariant = out.equivariant.colwise().mean().transpose();
  return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

constexpr const char* kMagic = "rgcn-params";
constexpr int kFormatVersion = 1;

void write_matrix(std::ostringstream& os, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? " " : "") << format_double(m(r, c));
    os << '\n';
  }
}

void write_vector(std::ostringstream& os, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << format_double(v[i]);
  os << '\n';
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      auto fields = split_whitespace(line);
      if (!fields.empty() && fields[0][0] != '#') return fields;
    }
    throw ConfigError("params: unexpected end of input after line " + std::to_string(line_no_));
  }

  void expect(const std::string& keyword, std::size_t arity) {
    current_ = next();
    if (current_[0] != keyword || current_.size() != arity + 1) {
      throw ConfigError("params: line " + std::to_string(line_no_) + ": expected '" + keyword +
                        "'");
    }
  }

  const std::vector<std::string>& current() const { return current_; }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto fields = next();
      if (static_cast<Eigen::Index>(fields.size()) != cols) {
        throw ConfigError("params: line " + std::to_string(line_no_) + ": expected " +
                          std::to_string(cols) + " values");
      }
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_double(fields[c]);
    }
    return m;
  }

 private:
  std::istringstream in_;
  std::vector<std::string> current_;
  int line_no_ = 0;
};

}  // namespace

std::string params_to_text(const GcnParams& params) {
  params.validate();
  std::ostringstream os;
  os << kMagic << ' ' << kFormatVersion << '\n';
  os << "widths";
  for (int w : params.widths) os << ' ' << w;
  os << '\n';
  os << "order " << params.order << '\n';
  os << "activation " << to_string(params.activation) << '\n';
  os << "output_dimension " << params.output_dimension() << '\n';
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    os << "layer " << l << '\n';
    for (std::size_t k = 0; k < params.layers[l].coefficients.size(); ++k) {
      os << "coefficients " << k << '\n';
      write_matrix(os, params.layers[l].coefficients[k]);
    }
    os << "bias\n";
    write_vector(os, params.layers[l].bias);
  }
  os << "readout\n";
  write_matrix(os, params.readout);
  os << "readout_bias\n";
  write_vector(os, params.readout_bias);
  os << "end\n";
  return os.str();
}

GcnParams params_from_text(const std::string& text) {
  LineReader reader(text);
  reader.expect(kMagic, 1);
  if (parse_integer(reader.current()[1]) != kFormatVersion) {
    throw ConfigError("params: unsupported format version " + reader.current()[1]);
  }
  GcnParams p;
  auto fields = reader.next();
  if (fields[0] != "widths" || fields.size() < 2) throw ConfigError("params: expected 'widths'");
  for (std::size_t i = 1; i < fields.size(); ++i) {
    p.widths.push_back(static_cast<int>(parse_integer(fields[i])));
  }
  reader.expect("order", 1);
  p.order = static_cast<int>(parse_integer(reader.current()[1]));
  reader.expect("activation", 1);
  p.activation = parse_activation(reader.current()[1]);
  reader.expect("output_dimension", 1);
  const auto d_out = static_cast<Eigen::Index>(parse_integer(reader.current()[1]));
  for (std::size_t l = 0; l + 1 < p.widths.size(); ++l) {
    reader.expect("layer", 1);
    GcnLayer layer;
    for (int k = 0; k <= p.order; ++k) {
      reader.expect("coefficients", 1);
      layer.coefficients.push_back(reader.matrix(p.widths[l + 1], p.widths[l]));
    }
    reader.expect("bias", 0);
    layer.bias = reader.matrix(1, p.widths[l + 1]).row(0).transpose();
    p.layers.push_back(std::move(layer));
  }
  reader.expect("readout", 0);
  p.readout = reader.matrix(p.widths.back(), d_out);
  reader.expect("readout_bias", 0);
  p.readout_bias = reader.matrix(1, d_out).row(0).transpose();
  reader.expect("end", 0);
  p.validate();
  return p;
}

void save_params(const GcnParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << params_to_text(params);
}

GcnParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return params_from_text(buffer.str());
}

}  // namespace rgcn
