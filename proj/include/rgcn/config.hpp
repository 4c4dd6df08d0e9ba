#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rgcn/fixtures.hpp"
#include "rgcn/gcn.hpp"
#include "rgcn/model.hpp"

namespace rgcn {

enum class Scenario {
  Convergence,
  SparsitySweep,
  StabilityEdges,
  StabilityDeform,
  AmplitudeSweep,
  ConcentrationCheck,
};

Scenario parse_scenario(const std::string& name);
std::string to_string(Scenario scenario);
std::vector<std::string> scenario_names();

/// A sparsity setting of a sweep: a constant alpha or c log(n) / n.
struct AlphaSetting {
  SparsitySchedule schedule;
  /// Spelling used in the config ("0.25", "4log").
  std::string label;

  double at(std::size_t n) const { return schedule.at(n); }
  bool is_constant() const { return schedule.kind == SparsitySchedule::Kind::Constant; }
};

/// "1", "0.25" for constants; "4log" or "4*log(n)/n" for 4 log(n) / n.
AlphaSetting parse_alpha(const std::string& text);

struct NetworkConfig {
  std::vector<int> widths{1, 8, 8, 8};
  int order = 2;
  std::uint64_t seed = 1;
  InitPolicy policy;

  GcnParams build() const;
};

struct DeformationConfig {
  /// Deformation fixture name.
  std::string kind = "bump";
  DeformTarget target = DeformTarget::Distribution;
  std::vector<double> amplitudes{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  /// Edge draws of the deformed run: "shared" reuses the baseline edge seed.
  bool shared_edges = true;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::Convergence;
  /// Fixture name, or "inline" when the model comes from [space]/[distribution]/... sections.
  std::string model_name = "bumped-surface-eps";
  RandomGraphModel model = make_model_fixture("bumped-surface-eps");
  NetworkConfig network;
  std::vector<std::size_t> n_grid{250, 500, 1000, 2000, 4000};
  std::vector<AlphaSetting> alpha_grid;
  /// Explicit (n, alpha) pairs for the concentration check; empty means n_grid x alpha_grid.
  std::vector<std::pair<std::size_t, AlphaSetting>> pairs;
  DeformationConfig deformation;
  int repeats = 10;
  std::size_t n_ref = 20000;
  std::size_t proxy_runs = 5;
  std::uint64_t seed = 1;
  double rho = 0.05;
  std::filesystem::path output_dir = "results";

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

ExperimentConfig default_config(Scenario scenario);

/// INI file with sections [experiment], [network], [deformation] and, for an inline model,
/// [space], [distribution], [kernel], [signal], [sparsity]. Unknown keys are errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One-paragraph human-readable summary.
std::string describe(const ExperimentConfig& config);

}  // namespace rgcn
