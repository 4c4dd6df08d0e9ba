#include "rgcn/bounds.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace rgcn {

FilterNorms compute_filter_norms(const GcnParams& params, double c_max, double c_min) {
  if (!(c_min > 0.0) || !(c_max > 0.0)) throw ConfigError("filter norms: c_max, c_min must be positive");
  FilterNorms out;
  out.ratio = 2.0 * c_max / c_min;
  out.readout_norm = spectral_norm_dense(params.readout);
  for (const auto& layer : params.layers) {
    LayerNorms ln;
    for (std::size_t k = 0; k < layer.coefficients.size(); ++k) {
      const Matrix& b = layer.coefficients[k];
      const double norm = spectral_norm_dense(b);
      const double kk = static_cast<double>(k);
      ln.h2 += norm;
      ln.h_d2 += kk * norm;
      ln.h_inf += spectral_norm_dense(b.cwiseAbs()) * std::pow(out.ratio, kk);
      if (k >= 1) ln.h_dinf += kk * norm * std::pow(out.ratio, kk - 1.0);
    }
    ln.bias_norm = layer.bias.size() ? layer.bias.norm() : 0.0;
    out.layers.push_back(ln);
  }
  return out;
}

double lipschitz_product(const FilterNorms& norms) {
  double p = 1.0;
  for (const auto& l : norms.layers) p *= l.h2;
  return p;
}

double cgcn_sup_bound(const FilterNorms& norms, double signal_sup, int layer) {
  if (layer < 0 || layer > static_cast<int>(norms.layers.size())) {
    throw ShapeError("cgcn_sup_bound: layer out of range");
  }
  double bound = signal_sup;
  for (int s = 0; s < layer; ++s) {
    bound = norms.layers[static_cast<std::size_t>(s)].h_inf * bound +
            norms.layers[static_cast<std::size_t>(s)].bias_norm;
  }
  return bound;
}

ModelConstants ModelConstants::of(const RandomGraphModel& model) {
  return {model.kernel.constants(), model.space.intrinsic_dimension};
}

ConvergenceConstants convergence_constants(const FilterNorms& norms, const ModelConstants& model,
                                           double signal_sup) {
  const auto& k = model.kernel;
  const int m = static_cast<int>(norms.layers.size());
  ConvergenceConstants out;
  for (int l = 0; l <= m; ++l) out.c_layer.push_back(norms.readout_norm * cgcn_sup_bound(norms, signal_sup, l));
  auto tail_h2 = [&](int l) {
    double p = 1.0;
    for (int s = l + 1; s < m; ++s) p *= norms.layers[static_cast<std::size_t>(s)].h2;
    return p;
  };
  double s1 = 0.0;
  double s2 = 0.0;
  for (int l = 0; l < m; ++l) {
    const auto& ln = norms.layers[static_cast<std::size_t>(l)];
    s1 += out.c_layer[static_cast<std::size_t>(l)] * ln.h_dinf * tail_h2(l);
    s2 += out.c_layer[static_cast<std::size_t>(l)] * ln.h_d2 * tail_h2(l);
  }
  out.c1 = (k.c_max + k.c_lip) / k.c_min * s1;
  out.c2 = k.c_max / (k.c_min * k.c_min) * s2;
  out.c3 = out.c_layer.back();
  return out;
}

double covering_term(const ModelConstants& model, double rho) {
  if (!(rho > 0.0)) throw ConfigError("covering term: rho must be positive");
  const auto& k = model.kernel;
  const double log_term = std::log(static_cast<double>(std::max(1, k.n_pieces)) / rho);
  return k.c_lip / k.c_min * std::sqrt(static_cast<double>(model.latent_dimension)) +
         (k.c_max + k.c_lip) / k.c_min * std::sqrt(std::max(0.0, log_term));
}

ConvergenceEnvelope convergence_envelope(const FilterNorms& norms, const ModelConstants& model,
                                         const std::vector<int>& widths, double signal_sup,
                                         std::size_t n, double alpha_n, double rho) {
  if (n == 0) throw ConfigError("envelope: n must be positive");
  if (!(alpha_n > 0.0) || alpha_n > 1.0) throw ConfigError("envelope: alpha_n must be in (0, 1]");
  if (!(rho > 0.0) || !(rho < 1.0)) throw ConfigError("envelope: rho must be in (0, 1)");
  ConvergenceEnvelope out;
  out.constants = convergence_constants(norms, model, signal_sup);
  const double width_sum = std::accumulate(widths.begin(), widths.end(), 0.0);
  const double nd = static_cast<double>(n);
  const double d = covering_term(model, rho / std::max(1.0, width_sum));
  out.r_n = out.constants.c1 * d / std::sqrt(nd) + out.constants.c2 / std::sqrt(nd * alpha_n);
  out.invariant_bound = out.r_n + out.constants.c3 * std::sqrt(std::log(1.0 / rho)) / std::sqrt(nd);

  const double d_rho = covering_term(model, rho);
  if (nd < d_rho * d_rho + 1.0 / rho) out.flags |= kSampleSizeBelowThreshold;
  if (sparsity_below_threshold(model, n, alpha_n)) out.flags |= kSparsityBelowThreshold;
  return out;
}

bool sparsity_below_threshold(const ModelConstants& model, std::size_t n, double alpha_n) {
  const auto& k = model.kernel;
  const double nd = static_cast<double>(n);
  return alpha_n < k.c_max / (k.c_min * k.c_min) * std::log(nd) / nd;
}

std::string describe_flags(unsigned flags) {
  std::ostringstream os;
  bool first = true;
  auto add = [&](const char* s) {
    if (!first) os << '|';
    os << s;
    first = false;
  };
  if (flags & kSampleSizeBelowThreshold) add("n_below_threshold");
  if (flags & kSparsityBelowThreshold) add("alpha_below_threshold");
  return os.str();
}

StabilityConstants stability_constants(const FilterNorms& norms, double c_min) {
  StabilityConstants out;
  const std::size_t m = norms.layers.size();
  double sum = 0.0;
  for (std::size_t l = 0; l < m; ++l) {
    double p = norms.layers[l].h_d2;
    for (std::size_t s = 0; s < m; ++s) {
      if (s != l) p *= norms.layers[s].h2;
    }
    sum += p;
  }
  out.c = norms.readout_norm * sum / (c_min * c_min);
  out.c_prime = norms.readout_norm * lipschitz_product(norms);
  return out;
}

StabilityEnvelope stability_envelope(const FilterNorms& norms, double c_min,
                                     const DeformationSize& size, double signal_norm,
                                     double signal_mismatch) {
  StabilityEnvelope out;
  out.constants = stability_constants(norms, c_min);
  const double c = out.constants.c;
  const double cp = out.constants.c_prime;
  const double grad = size.sup_grad_tau;
  if (size.c_w && size.c_grad_w) {
    const double ti = c * (*size.c_w + *size.c_grad_w) * signal_norm * grad;
    out.kernel_bound = ti;
    out.distribution_ti_bound = ti + cp * signal_mismatch;
  }
  if (size.c_w && size.c_p_tau && size.n_p_tau) {
    const double cp3 = std::pow(*size.c_p_tau, 3.0);
    out.distribution_general_bound = (c * cp3 * *size.c_w + cp) * signal_norm * *size.n_p_tau;
    if (size.c_grad_w) {
      out.signal_bound = (c * std::sqrt(*size.c_p_tau) * (*size.c_w + *size.c_grad_w) * grad +
                          (c * cp3 * *size.c_w + cp) * *size.n_p_tau) *
                         signal_norm;
    }
  }
  return out;
}

std::optional<double> degree_input_bound(const DeformationSize& size) {
  if (!size.c_grad_w) return std::nullopt;
  return *size.c_grad_w * size.sup_grad_tau;
}

double cgcn_lipschitz_constant(const GcnParams& params, const FilterNorms& norms,
                               const ModelConstants& model, double c_f,
                               const std::vector<double>& layer_l2) {
  const std::size_t m = params.layers.size();
  if (layer_l2.size() != m) throw ShapeError("cgcn_lipschitz_constant: need one L2 bound per layer");
  const auto& k = model.kernel;
  std::vector<double> b0(m);
  for (std::size_t l = 0; l < m; ++l) b0[l] = spectral_norm_dense(params.layers[l].coefficients[0]);
  double first = c_f;
  for (double b : b0) first *= b;
  double sum = 0.0;
  for (std::size_t l = 0; l < m; ++l) {
    double p = norms.layers[l].h2 * layer_l2[l];
    for (std::size_t s = 0; s < l; ++s) p *= b0[s];
    sum += p;
  }
  return norms.readout_norm * (first + k.c_lip * k.c_max / (k.c_min * k.c_min) * sum);
}

}  // namespace rgcn
