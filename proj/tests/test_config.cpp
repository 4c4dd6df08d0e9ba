#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "rgcn/config.hpp"

using namespace rgcn;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("scenario names round trip") {
  for (const auto& name : scenario_names()) CHECK(to_string(parse_scenario(name)) == name);
  CHECK_THROWS_AS(parse_scenario("convergance"), ConfigError);
}

TEST_CASE("alpha settings") {
  const auto one = parse_alpha("1");
  CHECK(one.is_constant());
  CHECK(one.at(100) == 1.0);
  const auto quarter = parse_alpha(" 0.25 ");
  CHECK(quarter.at(7) == 0.25);
  CHECK(quarter.label == "0.25");

  for (const std::string text : {"4log", "4*log(n)/n", "4log(n)/n"}) {
    const auto a = parse_alpha(text);
    CHECK_FALSE(a.is_constant());
    CHECK(a.at(1000) == doctest::Approx(4.0 * std::log(1000.0) / 1000.0));
  }
  CHECK_THROWS_AS(parse_alpha("0"), ConfigError);
  CHECK_THROWS_AS(parse_alpha("1.5"), ConfigError);
  CHECK_THROWS_AS(parse_alpha("-2log"), ConfigError);
  CHECK_THROWS_AS(parse_alpha("abc"), ConfigError);
}

TEST_CASE("defaults validate for every scenario") {
  for (const auto& name : scenario_names()) {
    const auto c = default_config(parse_scenario(name));
    CHECK_NOTHROW(c.validate());
    CHECK(c.n_grid.size() >= 1);
  }
  const auto amp = default_config(Scenario::AmplitudeSweep);
  CHECK(amp.repeats == 20);
  CHECK(amp.deformation.amplitudes.size() == 7);
  const auto conc = default_config(Scenario::ConcentrationCheck);
  CHECK(conc.pairs.size() == 3);
  CHECK(conc.model_name == "half-constant");
}

TEST_CASE("minimal file takes scenario defaults") {
  const auto c = parse_config_text("[experiment]\nscenario = sparsity-sweep\n");
  CHECK(c.scenario == Scenario::SparsitySweep);
  CHECK(c.alpha_grid.size() == 3);
  CHECK(c.alpha_grid[2].label == "4log");
  CHECK(c.n_grid.back() == 4000);
}

TEST_CASE("overrides") {
  const auto c = parse_config_text(R"(
[experiment]
scenario = stability-deform
model = square-eps
n_grid = 100, 200
alpha_grid = 1, 0.5
repeats = 3
seed = 42
rho = 0.1
output_dir = out/here

[network]
widths = 1, 4
order = 3
activation = tanh
scale_policy = unit-H2
bias_std = 0.1
seed = 9

[deformation]
kind = translation
target = kernel
amplitudes = 0, 0.1
edges = independent
)");
  CHECK(c.model_name == "square-eps");
  CHECK(c.model.kernel.kind() == KernelKind::EpsilonThreshold);
  CHECK(c.n_grid == std::vector<std::size_t>{100, 200});
  CHECK(c.alpha_grid.size() == 2);
  CHECK(c.repeats == 3);
  CHECK(c.seed == 42);
  CHECK(c.rho == 0.1);
  CHECK(c.output_dir == std::filesystem::path("out/here"));
  CHECK(c.network.widths == std::vector<int>{1, 4});
  CHECK(c.network.order == 3);
  CHECK(c.network.policy.activation == Activation::Tanh);
  CHECK(c.network.policy.scale_policy == InitPolicy::Scale::UnitH2);
  CHECK(c.network.policy.bias_std == 0.1);
  CHECK(c.network.seed == 9);
  CHECK(c.deformation.kind == "translation");
  CHECK(c.deformation.target == DeformTarget::Kernel);
  CHECK(c.deformation.amplitudes == std::vector<double>{0.0, 0.1});
  CHECK_FALSE(c.deformation.shared_edges);

  const auto params = c.network.build();
  CHECK(params.layer_count() == 1);
  CHECK(params.order == 3);
}

TEST_CASE("inline model") {
  const auto c = parse_config_text(R"(
[experiment]
scenario = convergence
n_grid = 50, 100
n_ref = 400

[space]
lower = 0, 0
upper = 1, 1

[distribution]
kind = mixture
weights = 0.5, 0.5
centers = 0.25, 0.25; 0.75, 0.75
spread = 0.1

[kernel]
kind = sbm
blocks = 0.8, 0.2; 0.2, 0.6
centers = 0.25, 0.25; 0.75, 0.75
c_max = 0.8
c_min = 0.3

[signal]
kind = coordinate
index = 1

[sparsity]
kind = log
c = 2
)");
  CHECK(c.model_name == "inline");
  CHECK(c.model.space.ambient_dimension == 2);
  CHECK(c.model.distribution.kind() == DistributionKind::FiniteMixture);
  CHECK(c.model.kernel.kind() == KernelKind::SbmBlock);
  CHECK(c.model.kernel.constants().c_min == 0.3);
  CHECK(c.model.signal.kind() == SignalKind::Coordinate);
  CHECK(c.model.sparsity.kind == SparsitySchedule::Kind::LogOverN);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("fixture with a replaced component") {
  const auto c = parse_config_text(R"(
[experiment]
scenario = stability-deform
model = square-gaussian

[signal]
kind = coordinate
index = 0
bound = 1
)");
  CHECK(c.model_name == "square-gaussian");
  CHECK(c.model.kernel.kind() == KernelKind::GaussianRbf);
  CHECK(c.model.signal.kind() == SignalKind::Coordinate);
}

TEST_CASE("errors name the offending key") {
  CHECK(contains(error_of("[experiment]\nscenario = convergence\nrepeatz = 3\n"), "experiment.repeatz"));
  CHECK(contains(error_of("[experiment]\nscenario = nope\n"), "experiment.scenario"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\nrepeats = many\n"), "experiment.repeats"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\nn_grid = 500, 250\n"), "experiment.n_grid"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\nrepeats = 0\n"), "experiment.repeats"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\nn_ref = 1000\n"), "experiment.n_ref"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\nmodel = nothing\n"), "experiment.model"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\nalpha_grid = 1, 2\n"), "experiment.alpha_grid"));
  CHECK(contains(error_of("[experiment]\nscenario = concentration-check\npairs = 500\n"), "experiment.pairs"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\n[network]\nwidths = 2, 4\n"), "network.widths"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\n[network]\nactivation = gelu\n"),
                 "network.activation"));
  CHECK(contains(error_of("[experiment]\nscenario = stability-deform\n[deformation]\nedges = maybe\n"),
                 "deformation.edges"));
  CHECK(contains(error_of("[experiment]\nscenario = stability-deform\n[deformation]\nkind = twist\n"),
                 "deformation.kind"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\n[bogus]\nx = 1\n"), "[bogus]"));
  CHECK(contains(error_of("[network]\norder = 1\n"), "[experiment]"));
  CHECK(contains(error_of("[experiment]\nscenario = convergence\n[kernel]\nkind = gaussian\n"), "inline model"));
  CHECK(contains(error_of("[experiment]\nscenario = concentration-check\npairs = 9000:1\n"), "experiment.pairs"));
  CHECK(contains(error_of("[experiment\nscenario = convergence\n"), "line"));
}

TEST_CASE("load_config reads files") {
  const auto path = std::filesystem::temp_directory_path() / "rgcn_test_config.ini";
  {
    std::ofstream out(path);
    out << "; comment\n[experiment]\nscenario = concentration-check\npairs = 100:1, 200:0.5\nrepeats = 2\n";
  }
  const auto c = load_config(path);
  CHECK(c.pairs.size() == 2);
  CHECK(c.pairs[1].first == 200);
  CHECK(c.pairs[1].second.at(200) == 0.5);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("describe mentions the essentials") {
  const auto text = describe(default_config(Scenario::AmplitudeSweep));
  CHECK(contains(text, "deform-amplitude-sweep"));
  CHECK(contains(text, "square-gaussian"));
  CHECK(contains(text, "bump"));
}
