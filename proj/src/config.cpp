#include "rgcn/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rgcn/fixtures.hpp"
#include "rgcn/text_io.hpp"

namespace rgcn {

namespace pt = boost::property_tree;

namespace {

const std::vector<std::pair<Scenario, std::string>>& scenario_table() {
  static const std::vector<std::pair<Scenario, std::string>> t{
      {Scenario::Convergence, "convergence"},
      {Scenario::SparsitySweep, "sparsity-sweep"},
      {Scenario::StabilityEdges, "stability-edges"},
      {Scenario::StabilityDeform, "stability-deform"},
      {Scenario::AmplitudeSweep, "deform-amplitude-sweep"},
      {Scenario::ConcentrationCheck, "concentration-check"},
  };
  return t;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"experiment",
       {"scenario", "model", "n_grid", "alpha_grid", "pairs", "repeats", "n_ref", "proxy_runs", "seed", "rho", "output_dir"}},
      {"network",
       {"widths", "order", "seed", "activation", "scale_policy", "scale", "bias_std", "output_dimension"}},
      {"deformation", {"kind", "target", "amplitudes", "edges"}},
      {"space", {"lower", "upper", "intrinsic_dimension", "description"}},
      {"distribution", {"kind", "lower", "upper", "amplitude", "weights", "centers", "spread"}},
      {"kernel",
       {"kind", "bandwidth", "radius", "value", "blocks", "centers", "c_max", "c_min", "c_lip", "n_pieces"}},
      {"signal", {"kind", "value", "index", "bound", "n_mc", "seed"}},
      {"sparsity", {"kind", "alpha", "c", "gamma"}},
  };
  return k;
}

/// Typed access to one section, with "section.key" in every error.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool present() const { return tree_ != nullptr; }
  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string key_name(const std::string& key) const { return name_ + "." + key; }

  std::string text(const std::string& key) const {
    if (!has(key)) throw ConfigError(key_name(key) + ": missing required key");
    return std::string(trim(tree_->get<std::string>(key)));
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  template <class Fn>
  auto convert(const std::string& key, Fn fn) const {
    try {
      return fn(text(key));
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      if (what.rfind(key_name(key), 0) == 0) throw;
      throw ConfigError(key_name(key) + ": " + what);
    }
  }

  double number(const std::string& key) const {
    return convert(key, [](const std::string& s) { return parse_double(s); });
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) const {
    return convert(key, [](const std::string& s) { return parse_integer(s); });
  }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) const {
    return convert(key, [](const std::string& s) {
      std::vector<double> out;
      for (const auto& tok : split(s, ',')) out.push_back(parse_double(tok));
      return out;
    });
  }

  Vector vector(const std::string& key) const {
    const auto v = numbers(key);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  /// Rows separated by ';', entries by ','.
  Matrix matrix(const std::string& key) const {
    return convert(key, [&](const std::string& s) {
      std::vector<std::vector<double>> rows;
      for (const auto& row : split(s, ';')) {
        std::vector<double> r;
        for (const auto& tok : split(row, ',')) r.push_back(parse_double(tok));
        rows.push_back(std::move(r));
      }
      Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw ConfigError("rows have different lengths");
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
      }
      return m;
    });
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
};

std::size_t to_size(const Section& s, const std::string& key, long long value) {
  if (value < 0) throw ConfigError(s.key_name(key) + ": must be nonnegative");
  return static_cast<std::size_t>(value);
}

LatentSpace parse_space(const Section& s) {
  const Vector lower = s.vector("lower");
  const Vector upper = s.vector("upper");
  const auto intrinsic = static_cast<int>(s.integer("intrinsic_dimension", lower.size()));
  LatentSpace space = LatentSpace::box(lower, upper, intrinsic, s.text("description", "box"));
  try {
    space.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("space: " + std::string(e.what()));
  }
  return space;
}

NodeDistribution parse_distribution(const Section& s, const LatentSpace& space) {
  const std::string kind = s.text("kind");
  if (kind == "uniform-cube") {
    const Vector lower = s.has("lower") ? s.vector("lower") : space.lower;
    const Vector upper = s.has("upper") ? s.vector("upper") : space.upper;
    return NodeDistribution::uniform_cube(lower, upper);
  }
  if (kind == "bumped-surface") return NodeDistribution::bumped_surface(s.number("amplitude"));
  if (kind == "mixture") {
    const auto weights = s.numbers("weights");
    const Matrix centers = s.matrix("centers");
    try {
      return NodeDistribution::finite_mixture(weights, centers, s.number("spread", 0.0));
    } catch (const ConfigError& e) {
      throw ConfigError(s.key_name("weights") + ": " + e.what());
    }
  }
  throw ConfigError(s.key_name("kind") + ": unknown distribution kind '" + kind + "'");
}

KernelConstants parse_constants(const Section& s) {
  KernelConstants c;
  c.c_max = s.number("c_max");
  c.c_min = s.number("c_min");
  c.c_lip = s.number("c_lip", 0.0);
  c.n_pieces = static_cast<int>(s.integer("n_pieces", 1));
  return c;
}

Kernel parse_kernel(const Section& s) {
  const std::string kind = s.text("kind");
  const KernelConstants c = parse_constants(s);
  try {
    if (kind == "gaussian") return Kernel::gaussian_rbf(s.number("bandwidth"), c);
    if (kind == "epsilon") return Kernel::epsilon_threshold(s.number("radius"), c);
    if (kind == "constant") return Kernel::constant(s.number("value"), c);
    if (kind == "sbm") {
      Matrix centers = s.matrix("centers");
      return Kernel::sbm_block(s.matrix("blocks"), PointMatrix(centers), c);
    }
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("kernel.", 0) == 0) throw;
    throw ConfigError("kernel: " + what);
  }
  throw ConfigError(s.key_name("kind") + ": unknown kernel kind '" + kind + "'");
}

SignalFunction parse_signal(const Section& s, const Kernel& kernel, const NodeDistribution& dist) {
  const std::string kind = s.text("kind", "constant");
  if (kind == "constant") {
    return SignalFunction::constant(s.has("value") ? s.vector("value") : Vector::Ones(1));
  }
  if (kind == "coordinate") {
    const auto index = static_cast<int>(s.integer("index", 0));
    if (index < 0 || index >= dist.dimension()) {
      throw ConfigError(s.key_name("index") + ": coordinate index out of range");
    }
    return SignalFunction::coordinate(index, s.number("bound", 1.0));
  }
  if (kind == "degree") {
    return SignalFunction::degree(kernel, dist, to_size(s, "n_mc", s.integer("n_mc", 2000)),
                                  static_cast<std::uint64_t>(s.integer("seed", 11)));
  }
  throw ConfigError(s.key_name("kind") + ": unknown signal kind '" + kind + "'");
}

SparsitySchedule parse_sparsity(const Section& s) {
  const std::string kind = s.text("kind", "constant");
  if (kind == "constant") return SparsitySchedule::constant(s.number("alpha", 1.0));
  if (kind == "log") return SparsitySchedule::log_over_n(s.number("c"));
  if (kind == "power") return SparsitySchedule::power(s.number("c"), s.number("gamma"));
  throw ConfigError(s.key_name("kind") + ": unknown sparsity kind '" + kind + "'");
}

std::vector<std::size_t> parse_sizes(const Section& s, const std::string& key) {
  std::vector<std::size_t> out;
  for (double v : s.numbers(key)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(s.key_name(key) + ": sizes must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  for (const auto& [s, n] : scenario_table()) {
    if (n == name) return s;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string to_string(Scenario scenario) {
  for (const auto& [s, n] : scenario_table()) {
    if (s == scenario) return n;
  }
  return "unknown";
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& entry : scenario_table()) out.push_back(entry.second);
  return out;
}

AlphaSetting parse_alpha(const std::string& raw) {
  const std::string text(trim(raw));
  for (const std::string suffix : {"*log(n)/n", "log(n)/n", "log"}) {
    if (text.size() > suffix.size() && text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
      const double c = parse_double(text.substr(0, text.size() - suffix.size()));
      if (!(c > 0.0)) throw ConfigError("alpha schedule constant must be positive: '" + text + "'");
      return {SparsitySchedule::log_over_n(c), text};
    }
  }
  const double a = parse_double(text);
  if (!(a > 0.0) || a > 1.0) throw ConfigError("alpha must lie in (0, 1]: '" + text + "'");
  return {SparsitySchedule::constant(a), text};
}

GcnParams NetworkConfig::build() const { return random_init(widths, order, seed, policy); }

ExperimentConfig default_config(Scenario scenario) {
  ExperimentConfig c;
  c.scenario = scenario;
  c.alpha_grid = {parse_alpha("1")};
  switch (scenario) {
    case Scenario::Convergence:
      c.model_name = "bumped-surface-eps";
      break;
    case Scenario::SparsitySweep:
      c.model_name = "bumped-surface-eps";
      c.alpha_grid = {parse_alpha("1"), parse_alpha("0.25"), parse_alpha("4log")};
      break;
    case Scenario::StabilityEdges:
    case Scenario::StabilityDeform:
      c.model_name = "square-gaussian";
      c.deformation.amplitudes = {0.2};
      break;
    case Scenario::AmplitudeSweep:
      c.model_name = "square-gaussian";
      c.n_grid = {1000};
      c.repeats = 20;
      break;
    case Scenario::ConcentrationCheck:
      c.model_name = "half-constant";
      c.pairs = {{500, parse_alpha("1")}, {2000, parse_alpha("1")}, {2000, parse_alpha("0.25")}};
      break;
  }
  c.model = make_model_fixture(c.model_name);
  return c;
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw ConfigError("experiment.n_grid: must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw ConfigError("experiment.n_grid: node counts must be >= 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("experiment.n_grid: must be strictly increasing");
  }
  if (repeats < 1) throw ConfigError("experiment.repeats: must be >= 1");
  if (!(rho > 0.0) || !(rho < 1.0)) throw ConfigError("experiment.rho: must lie in (0, 1)");
  if (alpha_grid.empty()) throw ConfigError("experiment.alpha_grid: must not be empty");
  if (scenario == Scenario::Convergence && n_ref < 4 * n_grid.back()) {
    throw ConfigError("experiment.n_ref: must be at least 4 * max(n_grid) = " + std::to_string(4 * n_grid.back()));
  }
  if (scenario == Scenario::SparsitySweep && proxy_runs < 1) {
    throw ConfigError("experiment.proxy_runs: must be >= 1");
  }
  if (network.widths.empty()) throw ConfigError("network.widths: must not be empty");
  for (int w : network.widths) {
    if (w < 1) throw ConfigError("network.widths: widths must be positive");
  }
  if (network.order < 0) throw ConfigError("network.order: must be >= 0");
  if (network.policy.output_dimension < 1) throw ConfigError("network.output_dimension: must be >= 1");
  if (network.widths.front() != model.signal.output_dimension()) {
    throw ConfigError("network.widths: first width " + std::to_string(network.widths.front()) +
                      " does not match the signal dimension " + std::to_string(model.signal.output_dimension()));
  }
  for (double t : deformation.amplitudes) {
    if (!(t >= 0.0)) throw ConfigError("deformation.amplitudes: must be nonnegative");
  }
  if (deformation.amplitudes.empty()) throw ConfigError("deformation.amplitudes: must not be empty");
  if (scenario == Scenario::ConcentrationCheck) {
    for (const auto& [n, a] : pairs) {
      if (n > 8000) throw ConfigError("experiment.pairs: n above the dense kernel cap 8000");
    }
    if (pairs.empty()) {
      for (std::size_t n : n_grid) {
        if (n > 8000) throw ConfigError("experiment.n_grid: n above the dense kernel cap 8000");
      }
    }
  }
  try {
    model.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("model: " + std::string(e.what()));
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [name, section] : tree) {
    const auto allowed = allowed_keys().find(name);
    if (allowed == allowed_keys().end()) {
      if (section.empty()) throw ConfigError("config: key '" + name + "' outside any section");
      throw ConfigError("config: unknown section [" + name + "]");
    }
    for (const auto& [key, value] : section) {
      if (!allowed->second.contains(key)) throw ConfigError(name + "." + key + ": unknown key");
    }
  }
  auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(name, it == tree.not_found() ? nullptr : &it->second);
  };

  const Section exp = section("experiment");
  if (!exp.present()) throw ConfigError("config: missing [experiment] section");
  ExperimentConfig c = exp.convert("scenario", [](const std::string& s) { return default_config(parse_scenario(s)); });

  // Model: fixture, optionally with replaced components, or fully inline.
  const Section space = section("space");
  const Section dist = section("distribution");
  const Section kernel = section("kernel");
  const Section signal = section("signal");
  const Section sparsity = section("sparsity");
  const bool inline_model = space.present() || dist.present() || kernel.present();
  if (exp.has("model")) {
    c.model_name = exp.text("model");
    c.model = exp.convert("model", [](const std::string& s) { return make_model_fixture(s); });
  } else if (inline_model) {
    if (!space.present() || !dist.present() || !kernel.present()) {
      throw ConfigError("config: an inline model needs [space], [distribution] and [kernel]");
    }
    c.model_name = "inline";
  }
  if (space.present()) c.model.space = parse_space(space);
  if (dist.present()) c.model.distribution = parse_distribution(dist, c.model.space);
  if (kernel.present()) c.model.kernel = parse_kernel(kernel);
  if (signal.present()) c.model.signal = parse_signal(signal, c.model.kernel, c.model.distribution);
  if (sparsity.present()) c.model.sparsity = parse_sparsity(sparsity);
  if (c.model_name == "inline") c.model.name = "inline";

  if (exp.has("n_grid")) c.n_grid = parse_sizes(exp, "n_grid");
  if (exp.has("alpha_grid")) {
    c.alpha_grid = exp.convert("alpha_grid", [](const std::string& s) {
      std::vector<AlphaSetting> out;
      for (const auto& tok : split(s, ',')) out.push_back(parse_alpha(tok));
      return out;
    });
  }
  if (exp.has("pairs")) {
    c.pairs = exp.convert("pairs", [](const std::string& s) {
      std::vector<std::pair<std::size_t, AlphaSetting>> out;
      for (const auto& tok : split(s, ',')) {
        const auto parts = split(tok, ':');
        if (parts.size() != 2) throw ConfigError("expected n:alpha entries, got '" + tok + "'");
        const long long n = parse_integer(parts[0]);
        if (n < 2) throw ConfigError("n must be >= 2 in '" + tok + "'");
        out.emplace_back(static_cast<std::size_t>(n), parse_alpha(parts[1]));
      }
      return out;
    });
  }
  c.repeats = static_cast<int>(exp.integer("repeats", c.repeats));
  c.n_ref = to_size(exp, "n_ref", exp.integer("n_ref", static_cast<long long>(c.n_ref)));
  c.proxy_runs = to_size(exp, "proxy_runs", exp.integer("proxy_runs", static_cast<long long>(c.proxy_runs)));
  c.seed = static_cast<std::uint64_t>(exp.integer("seed", static_cast<long long>(c.seed)));
  c.rho = exp.number("rho", c.rho);
  if (exp.has("output_dir")) c.output_dir = exp.text("output_dir");

  const Section net = section("network");
  if (net.present()) {
    if (net.has("widths")) {
      c.network.widths.clear();
      for (double w : net.numbers("widths")) c.network.widths.push_back(static_cast<int>(w));
    }
    c.network.order = static_cast<int>(net.integer("order", c.network.order));
    c.network.seed = static_cast<std::uint64_t>(net.integer("seed", static_cast<long long>(c.network.seed)));
    if (net.has("activation")) c.network.policy.activation = net.convert("activation", parse_activation);
    if (net.has("scale_policy")) c.network.policy.scale_policy = net.convert("scale_policy", parse_scale_policy);
    c.network.policy.scale = net.number("scale", c.network.policy.scale);
    c.network.policy.bias_std = net.number("bias_std", c.network.policy.bias_std);
    c.network.policy.output_dimension =
        static_cast<int>(net.integer("output_dimension", c.network.policy.output_dimension));
  }

  const Section def = section("deformation");
  if (def.present()) {
    if (def.has("kind")) {
      c.deformation.kind = def.text("kind");
      def.convert("kind", [&](const std::string& s) { return make_deformation_fixture(s, c.model.space); });
    }
    if (def.has("target")) c.deformation.target = def.convert("target", parse_deform_target);
    if (def.has("amplitudes")) c.deformation.amplitudes = def.numbers("amplitudes");
    if (def.has("edges")) {
      const std::string e = def.text("edges");
      if (e != "shared" && e != "independent") {
        throw ConfigError(def.key_name("edges") + ": expected 'shared' or 'independent'");
      }
      c.deformation.shared_edges = e == "shared";
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string describe(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "scenario " << to_string(c.scenario) << ", model " << c.model_name << " (" << c.model.kernel.kind_name()
     << " kernel, " << c.model.distribution.kind_name() << " distribution, signal " << c.model.signal.name()
     << ")\n";
  os << "network widths";
  for (int w : c.network.widths) os << ' ' << w;
  os << ", order " << c.network.order << ", activation " << to_string(c.network.policy.activation)
     << ", seed " << c.network.seed << "\n";
  os << "n_grid";
  for (auto n : c.n_grid) os << ' ' << n;
  os << "; alpha";
  for (const auto& a : c.alpha_grid) os << ' ' << a.label;
  os << "; repeats " << c.repeats << "; n_ref " << c.n_ref << "; seed " << c.seed << "\n";
  os << "output " << c.output_dir.string() << "\n";
  if (c.scenario == Scenario::StabilityDeform || c.scenario == Scenario::AmplitudeSweep) {
    os << "deformation " << c.deformation.kind << " on " << to_string(c.deformation.target) << ", amplitudes";
    for (double t : c.deformation.amplitudes) os << ' ' << t;
    os << (c.deformation.shared_edges ? ", shared edges" : ", independent edges") << "\n";
  }
  return os.str();
}

}  // namespace rgcn
