#pragma once

#include <cstdint>
#include <functional>

#include "rgcn/common.hpp"

namespace rgcn {

struct PowerIterationOptions {
  int max_iterations = 300;
  double relative_tolerance = 1e-10;
  int restarts = 1;
  std::uint64_t seed = 0x9017;
};

/// Largest |eigenvalue| of a symmetric operator of size n, by power iteration with
/// fixed-seed Gaussian start vectors. Returns the max over restarts.
double power_iteration_norm(const std::function<Vector(const Vector&)>& apply, Eigen::Index n,
                            const PowerIterationOptions& options = {});

}  // namespace rgcn
