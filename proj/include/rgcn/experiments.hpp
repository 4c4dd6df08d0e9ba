#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rgcn/config.hpp"
#include "rgcn/model.hpp"

namespace rgcn {

inline constexpr const char* kResultSchema = "# rgcn-results v1";

struct ResultRow {
  std::string scenario;
  std::size_t n = 0;
  /// alpha_n actually used at this n.
  double alpha = 1.0;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
  /// Empty when the matching constants are not computable.
  std::optional<double> envelope;
  /// '|'-separated tokens, e.g. "alpha_schedule:4log|alpha_below_threshold".
  std::string flags;
  double wall_ms = 0.0;

  bool has_flag(const std::string& token) const;
};

class ResultTable {
 public:
  std::vector<ResultRow> rows;

  void append(ResultTable other);
  /// Canonical order: scenario, metric, flags, alpha, n, amplitude, seed.
  void sort();

  std::vector<ResultRow> select(const std::function<bool(const ResultRow&)>& keep) const;
  std::vector<double> values(const std::string& metric,
                             const std::function<bool(const ResultRow&)>& keep = {}) const;

  /// Throws NumericalPrecondition on a non-finite value.
  void check_finite() const;

  /// Same rows ignoring wall-time.
  bool same_results(const ResultTable& other) const;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  std::string to_csv() const;
  static ResultTable read_csv(std::istream& in);
  static ResultTable read_csv(const std::filesystem::path& path);
};

struct RunOptions {
  int jobs = 1;
};

/// Runs body(0..count-1) on up to `jobs` threads; rethrows the first exception.
template <class Body>
void parallel_for(std::size_t count, int jobs, Body&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          {
            std::lock_guard lock(failure_mutex);
            if (failure) return;
          }
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Seed of repeat r; shared by every grid point so graphs are nested across n and alpha.
std::uint64_t repeat_seed(const ExperimentConfig& config, int repeat);

ResultTable run_convergence(const ExperimentConfig& config, const RunOptions& options = {});
ResultTable run_sparsity_sweep(const ExperimentConfig& config, const RunOptions& options = {});
/// stability-edges: baseline vs edge redraw. stability-deform: additionally the deformed run.
ResultTable run_stability(const ExperimentConfig& config, const RunOptions& options = {});
ResultTable run_amplitude_sweep(const ExperimentConfig& config, const RunOptions& options = {});
ResultTable run_concentration_check(const ExperimentConfig& config, const RunOptions& options = {});
ResultTable run_scenario(const ExperimentConfig& config, const RunOptions& options = {});

/// ||d_{W_tau,P} - d_{W,P}||_{L2(P)} by Monte Carlo, inner samples shared by both degree
/// functions. The standard error covers the outer average.
Estimate degree_input_deviation(const RandomGraphModel& model, const Deformation& tau,
                                std::size_t n_outer, std::size_t n_inner, std::uint64_t seed);

double median(std::vector<double> values);
double mean(const std::vector<double>& values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Fit of log(y) against log(x).
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Median per (metric, flags, alpha, n, amplitude) group, as text lines.
std::string summarize(const ResultTable& table);

}  // namespace rgcn
