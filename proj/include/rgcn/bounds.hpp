#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rgcn/gcn.hpp"
#include "rgcn/model.hpp"

namespace rgcn {

struct LayerNorms {
  /// sum_k ||B_k||
  double h2 = 0.0;
  /// sum_k k ||B_k||
  double h_d2 = 0.0;
  /// sum_k || |B_k| || r^k with r = 2 c_max / c_min
  double h_inf = 0.0;
  /// sum_k k ||B_k|| r^(k-1)
  double h_dinf = 0.0;
  double bias_norm = 0.0;
};

struct FilterNorms {
  std::vector<LayerNorms> layers;
  /// 2 c_max / c_min
  double ratio = 0.0;
  /// ||theta||
  double readout_norm = 0.0;
};

/// Spectral norms by dense SVD. Entrywise absolute values for h_inf.
FilterNorms compute_filter_norms(const GcnParams& params, double c_max, double c_min);

/// prod_l H_2^(l): the Lipschitz constant of the propagation layers in Frobenius norm.
double lipschitz_product(const FilterNorms& norms);

/// Sup-norm bound on the c-GCN function after `layer` layers:
///   ||f||_inf prod_{s<layer} H_inf^(s) + sum_{s<layer} ||b^(s)|| prod_{s<p<layer} H_inf^(p).
double cgcn_sup_bound(const FilterNorms& norms, double signal_sup, int layer);

struct ModelConstants {
  KernelConstants kernel;
  /// Dimension d_x of the latent space.
  int latent_dimension = 1;

  static ModelConstants of(const RandomGraphModel& model);
};

struct ConvergenceConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  /// C^(l) for l = 0..M.
  std::vector<double> c_layer;
};

ConvergenceConstants convergence_constants(const FilterNorms& norms, const ModelConstants& model,
                                           double signal_sup);

/// (c_lip / c_min) sqrt(d_x) + ((c_max + c_lip) / c_min) sqrt(log(n_pieces / rho)).
double covering_term(const ModelConstants& model, double rho);

enum EnvelopeFlag : unsigned {
  kSampleSizeBelowThreshold = 1u << 0,
  kSparsityBelowThreshold = 1u << 1,
};

struct ConvergenceEnvelope {
  double r_n = 0.0;
  double invariant_bound = 0.0;
  ConvergenceConstants constants;
  /// Bitwise EnvelopeFlag; thresholds evaluated with universal constants set to 1.
  unsigned flags = 0;
};

/// Equivariant MSE envelope R_n = C1 D(rho / sum_l d_l) n^-1/2 + C2 (n alpha)^-1/2 and the
/// invariant envelope R_n + C3 sqrt(log(1/rho)) n^-1/2. Hidden universal constants are 1.
ConvergenceEnvelope convergence_envelope(const FilterNorms& norms, const ModelConstants& model,
                                         const std::vector<int>& widths, double signal_sup,
                                         std::size_t n, double alpha_n, double rho);

/// alpha_n < (c_max / c_min^2) log(n) / n.
bool sparsity_below_threshold(const ModelConstants& model, std::size_t n, double alpha_n);

std::string describe_flags(unsigned flags);

struct StabilityConstants {
  /// ||theta|| c_min^-2 sum_l H_d2^(l) prod_{s != l} H_2^(s)
  double c = 0.0;
  /// ||theta|| prod_l H_2^(l)
  double c_prime = 0.0;
};

StabilityConstants stability_constants(const FilterNorms& norms, double c_min);

struct StabilityEnvelope {
  std::optional<double> kernel_bound;
  std::optional<double> distribution_ti_bound;
  std::optional<double> distribution_general_bound;
  std::optional<double> signal_bound;
  StabilityConstants constants;
};

/// Right-hand sides of the deformation bounds with unit hidden constants. A bound whose
/// ingredients are missing from `size` stays empty. `signal_mismatch` is ||f'_tau - f||
/// for the translation-invariant distribution bound.
StabilityEnvelope stability_envelope(const FilterNorms& norms, double c_min,
                                     const DeformationSize& size, double signal_norm,
                                     double signal_mismatch = 0.0);

/// C_grad_w ||grad tau||_inf, the bound on ||T_tau d_{W,P_tau} - d_{W,P}|| for degree inputs.
std::optional<double> degree_input_bound(const DeformationSize& size);

/// Piecewise Lipschitz constant of the c-GCN output for a c_f-Lipschitz input. `layer_l2`
/// holds L2(P) bounds of f^(l), l = 0..M-1. Informational only.
double cgcn_lipschitz_constant(const GcnParams& params, const FilterNorms& norms,
                               const ModelConstants& model, double c_f,
                               const std::vector<double>& layer_l2);

}  // namespace rgcn
