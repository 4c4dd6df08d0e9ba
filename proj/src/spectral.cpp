#include "rgcn/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "rgcn/rng.hpp"

namespace rgcn {

double power_iteration_norm(const std::function<Vector(const Vector&)>& apply, Eigen::Index n,
                            const PowerIterationOptions& options) {
  if (n == 0) return 0.0;
  double best = 0.0;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    CounterRng rng(derive_seed(options.seed, r));
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < options.max_iterations; ++it) {
      Vector w = apply(v);
      const double norm = w.norm();
      if (norm == 0.0) {
        estimate = 0.0;
        break;
      }
      const double previous = estimate;
      estimate = norm;
      v = w / norm;
      if (it > 0 && std::abs(estimate - previous) <= options.relative_tolerance * estimate) break;
    }
    best = std::max(best, estimate);
  }
  return best;
}

}  // namespace rgcn
