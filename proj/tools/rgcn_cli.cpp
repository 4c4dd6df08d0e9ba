#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "rgcn/config.hpp"
#include "rgcn/experiments.hpp"
#include "rgcn/fixtures.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int run_command(const std::string& scenario_name, const std::string& config_path,
                const std::optional<std::string>& out_dir, const std::optional<std::uint64_t>& seed, int jobs) {
  const rgcn::Scenario scenario = rgcn::parse_scenario(scenario_name);
  rgcn::ExperimentConfig config =
      config_path.empty() ? rgcn::default_config(scenario) : rgcn::load_config(config_path);
  if (config.scenario != scenario) {
    throw rgcn::ConfigError("experiment.scenario: config declares '" + rgcn::to_string(config.scenario) +
                            "' but the command asked for '" + scenario_name + "'");
  }
  if (out_dir) config.output_dir = *out_dir;
  if (seed) config.seed = *seed;
  if (jobs < 1) throw rgcn::ConfigError("--jobs must be >= 1");
  config.validate();

  std::cerr << rgcn::describe(config);
  const rgcn::ResultTable table = rgcn::run_scenario(config, {jobs});
  const auto path = config.output_dir / (scenario_name + ".csv");
  table.write_csv(path);
  std::cout << rgcn::summarize(table);
  std::cerr << "wrote " << table.rows.size() << " rows to " << path.string() << "\n";
  return 0;
}

void list_fixtures() {
  std::cout << "models:\n";
  for (const auto& f : rgcn::model_fixtures()) std::cout << "  " << f.name << "  " << f.description << "\n";
  std::cout << "deformations:\n";
  for (const auto& f : rgcn::deformation_fixtures()) std::cout << "  " << f.name << "  " << f.description << "\n";
  std::cout << "scenarios:\n";
  for (const auto& s : rgcn::scenario_names()) std::cout << "  " << s << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-graph GCN convergence and stability experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment scenario and write <out>/<scenario>.csv");
  std::string scenario;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  run->add_option("scenario", scenario, "Scenario name")->required();
  run->add_option("--config", config_path, "INI config file; scenario defaults when omitted");
  run->add_option("--out", out_dir, "Output directory (overrides experiment.output_dir)");
  run->add_option("--seed", seed, "Master seed (overrides experiment.seed)");
  run->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  app.add_subcommand("list-fixtures", "List model and deformation fixtures");

  auto* validate = app.add_subcommand("validate-config", "Parse and check a config file");
  std::string validate_path;
  validate->add_option("file", validate_path, "INI config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return run_command(scenario, config_path, out_dir, seed, jobs);
    if (app.got_subcommand("list-fixtures")) {
      list_fixtures();
      return 0;
    }
    if (*validate) {
      std::cout << rgcn::describe(rgcn::load_config(validate_path));
      return 0;
    }
  } catch (const rgcn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rgcn::NumericalPrecondition& e) {
    std::cerr << "numerical precondition failed: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const rgcn::CapacityError& e) {
    std::cerr << "capacity exceeded: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
