#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rgcn/experiments.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "rgcn_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(RGCN_CLI) + " " + args + " >" + (kWork / "stdout.txt").string() + " 2>" +
                          (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
  const auto path = kWork / name;
  std::ofstream(path) << text;
  return path;
}

const char* kSmall = R"([experiment]
scenario = concentration-check
model = half-constant
pairs = 60:1, 120:0.5
repeats = 2
)";

}  // namespace

TEST_CASE("cli") {
  fs::remove_all(kWork);
  fs::create_directories(kWork);

  SUBCASE("list-fixtures") {
    CHECK(run("list-fixtures") == 0);
    const auto out = slurp(kWork / "stdout.txt");
    CHECK(out.find("bumped-surface-eps") != std::string::npos);
    CHECK(out.find("bump") != std::string::npos);
    CHECK(out.find("deform-amplitude-sweep") != std::string::npos);
  }

  SUBCASE("validate-config") {
    CHECK(run("validate-config " + write("ok.ini", kSmall).string()) == 0);
    CHECK(run("validate-config " + write("bad.ini", "[experiment]\nscenario = convergence\nfoo = 1\n").string()) == 2);
    CHECK(slurp(kWork / "stderr.txt").find("experiment.foo") != std::string::npos);
    CHECK(run("validate-config " + (kWork / "missing.ini").string()) == 2);
  }

  SUBCASE("run writes a deterministic table") {
    const auto cfg = write("small.ini", kSmall);
    CHECK(run("run concentration-check --config " + cfg.string() + " --out " + (kWork / "a").string()) == 0);
    CHECK(run("run concentration-check --config " + cfg.string() + " --out " + (kWork / "b").string() +
              " --jobs 2") == 0);
    const auto a = rgcn::ResultTable::read_csv(kWork / "a" / "concentration-check.csv");
    const auto b = rgcn::ResultTable::read_csv(kWork / "b" / "concentration-check.csv");
    CHECK(a.rows.size() == 8);
    CHECK(a.same_results(b));
    CHECK(slurp(kWork / "a" / "concentration-check.csv").rfind(rgcn::kResultSchema, 0) == 0);

    CHECK(run("run concentration-check --config " + cfg.string() + " --out " + (kWork / "c").string() +
              " --seed 5") == 0);
    const auto c = rgcn::ResultTable::read_csv(kWork / "c" / "concentration-check.csv");
    CHECK_FALSE(c.same_results(a));
  }

  SUBCASE("exit codes") {
    CHECK(run("run nonsense") == 2);
    CHECK(run("run convergence --config " + write("small2.ini", kSmall).string()) == 2);
    CHECK(run("run concentration-check --jobs 0 --config " + write("small3.ini", kSmall).string()) == 2);
    CHECK(run("frobnicate") == 2);
    const auto domain = write("domain.ini", R"([experiment]
scenario = deform-amplitude-sweep
model = square-gaussian
n_grid = 50
repeats = 1

[deformation]
kind = translation
amplitudes = 0.5
)");
    CHECK(run("run deform-amplitude-sweep --config " + domain.string() + " --out " + (kWork / "d").string()) == 3);
  }

  fs::remove_all(kWork);
}
