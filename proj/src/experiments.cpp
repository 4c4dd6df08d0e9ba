#include "rgcn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "rgcn/bounds.hpp"
#include "rgcn/fixtures.hpp"
#include "rgcn/gcn.hpp"
#include "rgcn/graph.hpp"
#include "rgcn/metrics.hpp"
#include "rgcn/reference.hpp"
#include "rgcn/rng.hpp"
#include "rgcn/text_io.hpp"

namespace rgcn {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string join_flags(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (t.empty()) continue;
    if (!out.empty()) out += '|';
    out += t;
  }
  return out;
}

/// Root-mean-square row-wise difference of two node signals.
double rms_difference(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("rms_difference: shape mismatch");
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.rows()));
}

RandomGraphModel with_alpha(const RandomGraphModel& model, const AlphaSetting& alpha) {
  RandomGraphModel m = model;
  m.sparsity = alpha.schedule;
  return m;
}

std::string schedule_token(const AlphaSetting& alpha) {
  return alpha.is_constant() ? std::string() : "alpha_schedule:" + alpha.label;
}

struct Task {
  std::function<std::vector<ResultRow>()> run;
};

ResultTable run_tasks(const std::vector<Task>& tasks, int jobs) {
  std::vector<std::vector<ResultRow>> out(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const auto start = Clock::now();
    out[i] = tasks[i].run();
    const double ms = elapsed_ms(start);
    for (auto& r : out[i]) r.wall_ms = ms;
  });
  ResultTable table;
  for (auto& rows : out) {
    for (auto& r : rows) table.rows.push_back(std::move(r));
  }
  table.check_finite();
  table.sort();
  return table;
}

/// Edge seed of the redraw run, fixed per baseline seed.
std::uint64_t redraw_seed(const GraphSeeds& seeds) { return derive_seed(seeds.edges, 0x4ed4a3); }

Deformation deformation_at(const ExperimentConfig& config, double amplitude) {
  return make_deformation_fixture(config.deformation.kind, config.model.space).with_amplitude(amplitude);
}

struct DeformationContext {
  double amplitude = 0.0;
  RandomGraphModel model;
  DeformationSize size;
  std::optional<double> envelope;
  bool grad_above_half = false;
};

double signal_mismatch(const RandomGraphModel& model, const Deformation& tau, std::uint64_t seed) {
  const PointMatrix x = sample_latents(model, 4000, seed);
  const SignalFunction moved = model.signal.composed(tau);
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) s += (moved(row_view(x, i)) - model.signal(row_view(x, i))).squaredNorm();
  return std::sqrt(s / static_cast<double>(x.rows()));
}

std::vector<DeformationContext> deformation_contexts(const ExperimentConfig& config, const FilterNorms& norms) {
  const auto& model = config.model;
  const double signal_norm = signal_l2_norm(model, 10000, derive_seed(config.seed, 0x51a)).value;
  std::vector<DeformationContext> out;
  for (double t : config.deformation.amplitudes) {
    const Deformation tau = deformation_at(config, t);
    if (config.deformation.target == DeformTarget::Distribution) check_deformation_domain(model, tau);
    DeformationContext c{t, deform_model(model, tau, config.deformation.target), {}, std::nullopt, false};
    DeformationSizeOptions opts;
    opts.seed = derive_seed(config.seed, 0xdef0);
    c.size = deformation_size(tau, model, opts);
    c.grad_above_half = c.size.sup_grad_tau > 0.5;
    double mismatch = 0.0;
    if (config.deformation.target == DeformTarget::Distribution && model.signal.kind() != SignalKind::Constant) {
      mismatch = signal_mismatch(model, tau, derive_seed(config.seed, 0x5ad));
    }
    const StabilityEnvelope env =
        stability_envelope(norms, model.kernel.constants().c_min, c.size, signal_norm, mismatch);
    switch (config.deformation.target) {
      case DeformTarget::Kernel: c.envelope = env.kernel_bound; break;
      case DeformTarget::Distribution:
        c.envelope = env.distribution_ti_bound ? env.distribution_ti_bound : env.distribution_general_bound;
        break;
      case DeformTarget::Signal: c.envelope = env.signal_bound; break;
    }
    out.push_back(std::move(c));
  }
  return out;
}

GraphSeeds deformed_seeds(const ExperimentConfig& config, const GraphSeeds& base) {
  if (config.deformation.shared_edges) return base;
  return {base.latents, derive_seed(base.edges, 0xde4)};
}

}  // namespace

bool ResultRow::has_flag(const std::string& token) const {
  for (const auto& t : split(flags, '|')) {
    if (t == token) return true;
  }
  return false;
}

void ResultTable::append(ResultTable other) {
  for (auto& r : other.rows) rows.push_back(std::move(r));
}

void ResultTable::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.scenario, a.metric, a.flags, a.alpha, a.n, a.amplitude, a.seed) <
           std::tie(b.scenario, b.metric, b.flags, b.alpha, b.n, b.amplitude, b.seed);
  });
}

std::vector<ResultRow> ResultTable::select(const std::function<bool(const ResultRow&)>& keep) const {
  std::vector<ResultRow> out;
  for (const auto& r : rows) {
    if (!keep || keep(r)) out.push_back(r);
  }
  return out;
}

std::vector<double> ResultTable::values(const std::string& metric,
                                        const std::function<bool(const ResultRow&)>& keep) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.metric == metric && (!keep || keep(r))) out.push_back(r.value);
  }
  return out;
}

void ResultTable::check_finite() const {
  for (const auto& r : rows) {
    if (!std::isfinite(r.value)) {
      throw NumericalPrecondition("non-finite value for metric " + r.metric + " at n = " + std::to_string(r.n));
    }
  }
}

bool ResultTable::same_results(const ResultTable& other) const {
  if (rows.size() != other.rows.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = other.rows[i];
    if (std::tie(a.scenario, a.n, a.alpha, a.amplitude, a.seed, a.metric, a.value, a.envelope, a.flags) !=
        std::tie(b.scenario, b.n, b.alpha, b.amplitude, b.seed, b.metric, b.value, b.envelope, b.flags)) {
      return false;
    }
  }
  return true;
}

void ResultTable::write_csv(std::ostream& out) const {
  out << kResultSchema << "\n";
  out << "scenario,n,alpha,amplitude,seed,metric,value,envelope,flags,wall_ms\n";
  for (const auto& r : rows) {
    char wall[32];
    std::snprintf(wall, sizeof(wall), "%.3f", r.wall_ms);
    out << r.scenario << ',' << r.n << ',' << format_double(r.alpha) << ',' << format_double(r.amplitude) << ','
        << r.seed << ',' << r.metric << ',' << format_double(r.value) << ','
        << (r.envelope ? format_double(*r.envelope) : std::string()) << ',' << r.flags << ',' << wall << "\n";
  }
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_csv(out);
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

ResultTable ResultTable::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultSchema) {
    throw ConfigError("results: missing schema line '" + std::string(kResultSchema) + "'");
  }
  if (!std::getline(in, line)) throw ConfigError("results: missing column header");
  ResultTable table;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 10) throw ConfigError("results: expected 10 columns in '" + line + "'");
    ResultRow r;
    r.scenario = cells[0];
    r.n = static_cast<std::size_t>(parse_integer(cells[1]));
    r.alpha = parse_double(cells[2]);
    r.amplitude = parse_double(cells[3]);
    r.seed = static_cast<std::uint64_t>(std::stoull(cells[4]));
    r.metric = cells[5];
    r.value = parse_double(cells[6]);
    if (!trim(cells[7]).empty()) r.envelope = parse_double(cells[7]);
    r.flags = cells[8];
    r.wall_ms = parse_double(cells[9]);
    table.rows.push_back(std::move(r));
  }
  return table;
}

ResultTable ResultTable::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  return read_csv(in);
}

std::uint64_t repeat_seed(const ExperimentConfig& config, int repeat) {
  return derive_seed(config.seed, 0x7e9ea7, static_cast<std::uint64_t>(repeat));
}

ResultTable run_convergence(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto& model = config.model;
  const std::string scenario = to_string(config.scenario);
  const GcnParams params = config.network.build();
  const ReferenceOperator reference = build_reference(model, config.n_ref, derive_seed(config.seed, 0x7ef));
  const CgcnResult limit = cgcn_forward(params, reference, model.signal);
  const KernelConstants& k = model.kernel.constants();
  const FilterNorms norms = compute_filter_norms(params, k.c_max, k.c_min);
  const ModelConstants mc = ModelConstants::of(model);

  std::vector<Task> tasks;
  for (const auto& alpha : config.alpha_grid) {
    const RandomGraphModel m = with_alpha(model, alpha);
    for (std::size_t n : config.n_grid) {
      for (int r = 0; r < config.repeats; ++r) {
        tasks.push_back({[&, m, alpha, n, r] {
          const std::uint64_t seed = repeat_seed(config, r);
          const SampledGraph g = sample_graph(m, n, GraphSeeds::from(seed));
          const NormalizedLaplacian lap = build_laplacian(g);
          const Matrix out = forward_equivariant(params, lap, g.signals);
          const Matrix expected = evaluate_at(reference, params, model.signal, g.latents, &limit);
          const Vector pooled = out.colwise().mean().transpose();
          const ConvergenceEnvelope env = convergence_envelope(norms, mc, config.network.widths,
                                                               model.signal.sup_norm_bound(), n, g.alpha_n, config.rho);
          const std::string flags = join_flags({schedule_token(alpha), describe_flags(env.flags)});
          ResultRow base{scenario, n, g.alpha_n, 0.0, seed, "", 0.0, std::nullopt, flags, 0.0};
          ResultRow eq = base;
          eq.metric = "mse_x";
          eq.value = mse_x(out, expected);
          eq.envelope = env.r_n;
          ResultRow inv = base;
          inv.metric = "invariant_error";
          inv.value = (pooled - limit.invariant).norm();
          inv.envelope = env.invariant_bound;
          return std::vector<ResultRow>{eq, inv};
        }});
      }
    }
  }
  return run_tasks(tasks, options.jobs);
}

ResultTable run_sparsity_sweep(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto& model = config.model;
  const std::string scenario = to_string(config.scenario);
  const GcnParams params = config.network.build();
  const KernelConstants& k = model.kernel.constants();
  const FilterNorms norms = compute_filter_norms(params, k.c_max, k.c_min);
  const ModelConstants mc = ModelConstants::of(model);

  const std::size_t n_proxy = 2 * config.n_grid.back();
  const RandomGraphModel dense = with_alpha(model, parse_alpha("1"));
  std::vector<Vector> proxy_runs(config.proxy_runs);
  parallel_for(config.proxy_runs, options.jobs, [&](std::size_t p) {
    const SampledGraph g = sample_graph(dense, n_proxy, GraphSeeds::from(derive_seed(config.seed, 0x9a0c, p)));
    proxy_runs[p] = forward_invariant(params, g, g.signals);
  });
  Vector proxy = Vector::Zero(params.output_dimension());
  for (const auto& v : proxy_runs) proxy += v;
  proxy /= static_cast<double>(proxy_runs.size());

  std::vector<Task> tasks;
  for (const auto& alpha : config.alpha_grid) {
    const RandomGraphModel m = with_alpha(model, alpha);
    for (std::size_t n : config.n_grid) {
      for (int r = 0; r < config.repeats; ++r) {
        tasks.push_back({[&, m, alpha, n, r] {
          const std::uint64_t seed = repeat_seed(config, r);
          const SampledGraph g = sample_graph(m, n, GraphSeeds::from(seed));
          const Vector pooled = forward_invariant(params, g, g.signals);
          const ConvergenceEnvelope env = convergence_envelope(norms, mc, config.network.widths,
                                                               model.signal.sup_norm_bound(), n, g.alpha_n, config.rho);
          ResultRow row{scenario,
                        n,
                        g.alpha_n,
                        0.0,
                        seed,
                        "invariant_error",
                        (pooled - proxy).norm(),
                        env.invariant_bound,
                        join_flags({schedule_token(alpha), describe_flags(env.flags)}),
                        0.0};
          return std::vector<ResultRow>{row};
        }});
      }
    }
  }
  return run_tasks(tasks, options.jobs);
}

ResultTable run_stability(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const std::string scenario = to_string(config.scenario);
  const GcnParams params = config.network.build();
  const KernelConstants& k = config.model.kernel.constants();
  const FilterNorms norms = compute_filter_norms(params, k.c_max, k.c_min);
  const ModelConstants mc = ModelConstants::of(config.model);
  const bool deform = config.scenario == Scenario::StabilityDeform;
  const std::vector<DeformationContext> contexts = deform ? deformation_contexts(config, norms)
                                                          : std::vector<DeformationContext>{};

  std::vector<Task> tasks;
  for (const auto& alpha : config.alpha_grid) {
    const RandomGraphModel m = with_alpha(config.model, alpha);
    for (std::size_t n : config.n_grid) {
      for (int r = 0; r < config.repeats; ++r) {
        tasks.push_back({[&, m, alpha, n, r] {
          const std::uint64_t seed = repeat_seed(config, r);
          const GraphSeeds seeds = GraphSeeds::from(seed);
          const SampledGraph g = sample_graph(m, n, seeds);
          const Matrix out = forward_equivariant(params, g, g.signals);
          const SampledGraph redraw = sample_graph_on_latents(m, g.latents, g.alpha_n, redraw_seed(seeds));
          const Matrix out_redraw = forward_equivariant(params, redraw, redraw.signals);
          const ConvergenceEnvelope env = convergence_envelope(norms, mc, config.network.widths,
                                                               m.signal.sup_norm_bound(), n, g.alpha_n, config.rho);
          const std::string base_flags = join_flags({schedule_token(alpha), describe_flags(env.flags)});
          std::vector<ResultRow> rows;
          rows.push_back({scenario, n, g.alpha_n, 0.0, seed, "edge_redraw_diff", rms_difference(out, out_redraw),
                          2.0 * env.r_n, base_flags, 0.0});
          for (const auto& c : contexts) {
            RandomGraphModel dm = c.model;
            dm.sparsity = alpha.schedule;
            const SampledGraph gd = sample_graph(dm, n, deformed_seeds(config, seeds));
            const Matrix out_d = forward_equivariant(params, gd, gd.signals);
            const std::string flags = join_flags({base_flags, c.grad_above_half ? "grad_tau_above_half" : ""});
            double sigma = 0.0;
            if (out.cols() == 1 || static_cast<std::size_t>(n) <= kExactAssignmentCap) {
              sigma = mse_sigma_exact(out, out_d).value;
            } else {
              sigma = mse_sigma_entropic(out, out_d).value;
            }
            rows.push_back({scenario, n, g.alpha_n, c.amplitude, seed, "deform_mse_sigma", sigma, c.envelope, flags, 0.0});
            rows.push_back({scenario, n, g.alpha_n, c.amplitude, seed, "deform_nodewise", rms_difference(out, out_d),
                            c.envelope, flags, 0.0});
          }
          return rows;
        }});
      }
    }
  }
  return run_tasks(tasks, options.jobs);
}

ResultTable run_amplitude_sweep(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const std::string scenario = to_string(config.scenario);
  const GcnParams params = config.network.build();
  const KernelConstants& k = config.model.kernel.constants();
  const FilterNorms norms = compute_filter_norms(params, k.c_max, k.c_min);
  const std::vector<DeformationContext> contexts = deformation_contexts(config, norms);

  std::vector<Task> tasks;
  for (const auto& alpha : config.alpha_grid) {
    const RandomGraphModel m = with_alpha(config.model, alpha);
    for (std::size_t n : config.n_grid) {
      for (int r = 0; r < config.repeats; ++r) {
        tasks.push_back({[&, m, alpha, n, r] {
          const std::uint64_t seed = repeat_seed(config, r);
          const GraphSeeds seeds = GraphSeeds::from(seed);
          const SampledGraph g = sample_graph(m, n, seeds);
          const Vector pooled = forward_invariant(params, g, g.signals);
          const SampledGraph redraw = sample_graph_on_latents(m, g.latents, g.alpha_n, redraw_seed(seeds));
          const Vector pooled_redraw = forward_invariant(params, redraw, redraw.signals);
          const std::string base_flags = schedule_token(alpha);
          std::vector<ResultRow> rows;
          rows.push_back({scenario, n, g.alpha_n, 0.0, seed, "edge_redraw_floor", (pooled - pooled_redraw).norm(),
                          std::nullopt, base_flags, 0.0});
          for (const auto& c : contexts) {
            RandomGraphModel dm = c.model;
            dm.sparsity = alpha.schedule;
            const SampledGraph gd = sample_graph(dm, n, deformed_seeds(config, seeds));
            const Vector pooled_d = forward_invariant(params, gd, gd.signals);
            rows.push_back({scenario, n, g.alpha_n, c.amplitude, seed, "invariant_diff", (pooled - pooled_d).norm(),
                            c.envelope, join_flags({base_flags, c.grad_above_half ? "grad_tau_above_half" : ""}),
                            0.0});
          }
          return rows;
        }});
      }
    }
  }
  return run_tasks(tasks, options.jobs);
}

ResultTable run_concentration_check(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const std::string scenario = to_string(config.scenario);
  const ModelConstants mc = ModelConstants::of(config.model);
  const double scale = mc.kernel.c_max / (mc.kernel.c_min * mc.kernel.c_min);
  std::vector<std::pair<std::size_t, AlphaSetting>> grid = config.pairs;
  if (grid.empty()) {
    for (const auto& a : config.alpha_grid) {
      for (std::size_t n : config.n_grid) grid.emplace_back(n, a);
    }
  }
  for (const auto& [n, a] : grid) {
    if (n > kDenseKernelCap) throw CapacityError("concentration check: n above the dense kernel cap");
  }

  std::vector<Task> tasks;
  for (const auto& [n_, alpha_] : grid) {
    const std::size_t n = n_;
    const AlphaSetting alpha = alpha_;
    const RandomGraphModel m = with_alpha(config.model, alpha);
    for (int r = 0; r < config.repeats; ++r) {
      tasks.push_back({[&, m, alpha, n, r] {
        const std::uint64_t seed = repeat_seed(config, r);
        const SampledGraph g = sample_graph(m, n, GraphSeeds::from(seed));
        const double dist = laplacian_spectral_distance(g, m, true);
        const double root = std::sqrt(g.alpha_n * static_cast<double>(n));
        const std::string flags = join_flags(
            {schedule_token(alpha), sparsity_below_threshold(mc, n, g.alpha_n) ? "alpha_below_threshold" : ""});
        return std::vector<ResultRow>{
            {scenario, n, g.alpha_n, 0.0, seed, "spectral_distance", dist, scale / root, flags, 0.0},
            {scenario, n, g.alpha_n, 0.0, seed, "normalized_statistic", dist * root, scale, flags, 0.0}};
      }});
    }
  }
  return run_tasks(tasks, options.jobs);
}

ResultTable run_scenario(const ExperimentConfig& config, const RunOptions& options) {
  switch (config.scenario) {
    case Scenario::Convergence: return run_convergence(config, options);
    case Scenario::SparsitySweep: return run_sparsity_sweep(config, options);
    case Scenario::StabilityEdges:
    case Scenario::StabilityDeform: return run_stability(config, options);
    case Scenario::AmplitudeSweep: return run_amplitude_sweep(config, options);
    case Scenario::ConcentrationCheck: return run_concentration_check(config, options);
  }
  throw ConfigError("unknown scenario");
}

Estimate degree_input_deviation(const RandomGraphModel& model, const Deformation& tau, std::size_t n_outer,
                                std::size_t n_inner, std::uint64_t seed) {
  if (n_outer < 2 || n_inner < 1) throw ConfigError("degree_input_deviation: sample sizes too small");
  const PointMatrix outer = sample_latents(model, n_outer, derive_seed(seed, 1));
  const PointMatrix inner = sample_latents(model, n_inner, derive_seed(seed, 2));
  const PointMatrix inner_moved = tau.apply_rows(inner);
  std::vector<double> sq(n_outer);
  for (std::size_t i = 0; i < n_outer; ++i) {
    const PointView x = row_view(outer, static_cast<Eigen::Index>(i));
    const Vector xm = tau.apply(x);
    double diff = 0.0;
    for (Eigen::Index j = 0; j < inner.rows(); ++j) {
      diff += kernel_eval(model.kernel, vector_view(xm), row_view(inner_moved, j)) -
              kernel_eval(model.kernel, x, row_view(inner, j));
    }
    diff /= static_cast<double>(n_inner);
    sq[i] = diff * diff;
  }
  const double m = mean(sq);
  double var = 0.0;
  for (double s : sq) var += (s - m) * (s - m);
  var /= static_cast<double>(n_outer - 1);
  Estimate out;
  out.value = std::sqrt(m);
  out.std_error = out.value > 0.0 ? std::sqrt(var / static_cast<double>(n_outer)) / (2.0 * out.value) : 0.0;
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line: need at least two paired points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return fit;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("fit_loglog: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

std::string summarize(const ResultTable& table) {
  using Key = std::tuple<std::string, std::string, double, std::size_t, double>;
  std::map<Key, std::vector<double>> groups;
  std::map<Key, std::vector<double>> envelopes;
  for (const auto& r : table.rows) {
    const Key key{r.metric, r.flags, r.alpha, r.n, r.amplitude};
    groups[key].push_back(r.value);
    if (r.envelope) envelopes[key].push_back(*r.envelope);
  }
  std::ostringstream os;
  os << "metric                 n       alpha       amplitude   median        envelope      flags\n";
  for (const auto& [key, values] : groups) {
    const auto& [metric, flags, alpha, n, amplitude] = key;
    char line[256];
    const auto env = envelopes.find(key);
    const std::string env_text = env == envelopes.end() ? "-" : format_double(median(env->second));
    std::snprintf(line, sizeof(line), "%-22s %-7zu %-11.4g %-11.4g %-13.6g %-13s %s\n", metric.c_str(), n, alpha,
                  amplitude, median(values), env_text.substr(0, 13).c_str(), flags.c_str());
    os << line;
  }
  return os.str();
}

}  // namespace rgcn
