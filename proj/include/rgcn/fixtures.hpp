#pragma once

#include <string>
#include <vector>

#include "rgcn/model.hpp"

namespace rgcn {

struct FixtureInfo {
  std::string name;
  std::string description;
};

/// Named random graph models shipped with the library.
std::vector<FixtureInfo> model_fixtures();
RandomGraphModel make_model_fixture(const std::string& name);

/// Named deformation families; the amplitude is applied by the caller.
std::vector<FixtureInfo> deformation_fixtures();
/// Base deformation for a latent space: "translation" (unit shift along the first axis),
/// "scaling" (tau(x) = x), "bump" (contraction toward the box center with width 0.2 of the
/// box diameter).
Deformation make_deformation_fixture(const std::string& name, const LatentSpace& space);

/// Two-block SBM with W = (1, 1/3; 1/3, 2/3) and pi = (1/3, 2/3): both block degrees are 5/9.
RandomGraphModel constant_degree_sbm();

}  // namespace rgcn
