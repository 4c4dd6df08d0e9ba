#include "rgcn/fixtures.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace rgcn {

namespace {

LatentSpace unit_square() { return LatentSpace::box(Vector::Zero(2), Vector::Ones(2), 2, "unit square"); }

RandomGraphModel bumped_surface_eps() {
  // Surface (u, v, 0.25 sin 2pi u sin 2pi v); epsilon graph of radius 0.45.
  // The smallest degree is at the corners, about 0.14.
  return {"bumped-surface-eps",
          LatentSpace::box((Vector(3) << 0.0, 0.0, -0.25).finished(),
                           (Vector(3) << 1.0, 1.0, 0.25).finished(), 2, "bumped surface in R^3"),
          NodeDistribution::bumped_surface(0.25),
          Kernel::epsilon_threshold(0.45, {1.0, 0.12, 0.0, 2}),
          SignalFunction::constant(Vector::Ones(1)),
          SparsitySchedule::constant(1.0)};
}

RandomGraphModel square_gaussian() {
  return {"square-gaussian", unit_square(),
          NodeDistribution::uniform_cube(Vector::Zero(2), Vector::Ones(2)),
          Kernel::gaussian_rbf(0.25, {1.0, 0.09, 1.0 / (0.25 * std::sqrt(std::numbers::e)), 1}),
          SignalFunction::constant(Vector::Ones(1)),
          SparsitySchedule::constant(1.0)};
}

RandomGraphModel square_eps() {
  return {"square-eps", unit_square(),
          NodeDistribution::uniform_cube(Vector::Zero(2), Vector::Ones(2)),
          Kernel::epsilon_threshold(0.3, {1.0, 0.06, 0.0, 2}),
          SignalFunction::constant(Vector::Ones(1)),
          SparsitySchedule::constant(1.0)};
}

RandomGraphModel half_constant() {
  return {"half-constant", unit_square(),
          NodeDistribution::uniform_cube(Vector::Zero(2), Vector::Ones(2)),
          Kernel::constant(0.5, {0.5, 0.5, 0.0, 1}),
          SignalFunction::constant(Vector::Ones(1)),
          SparsitySchedule::constant(1.0)};
}

RandomGraphModel line_gaussian() {
  return {"line-gaussian", LatentSpace::box(Vector::Zero(1), Vector::Ones(1), 1, "unit interval"),
          NodeDistribution::uniform_cube(Vector::Zero(1), Vector::Ones(1)),
          Kernel::gaussian_rbf(0.2, {1.0, 0.2, 1.0 / (0.2 * std::sqrt(std::numbers::e)), 1}),
          SignalFunction::coordinate(0, 1.0),
          SparsitySchedule::constant(1.0)};
}

struct Entry {
  std::string description;
  std::function<RandomGraphModel()> make;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> r{
      {"bumped-surface-eps",
       {"epsilon graph (r = 0.45) on a bumped surface in R^3, f = 1", bumped_surface_eps}},
      {"square-gaussian", {"Gaussian kernel (h = 0.25) on the uniform unit square, f = 1", square_gaussian}},
      {"square-eps", {"epsilon graph (r = 0.3) on the uniform unit square, f = 1", square_eps}},
      {"half-constant", {"constant kernel W = 1/2 on the unit square (Erdos-Renyi), f = 1", half_constant}},
      {"sbm-constant-degree",
       {"two-block SBM, W = (1, 1/3; 1/3, 2/3), pi = (1/3, 2/3), equal block degrees 5/9", constant_degree_sbm}},
      {"line-gaussian", {"Gaussian kernel (h = 0.2) on the uniform unit interval, f(x) = x", line_gaussian}},
  };
  return r;
}

}  // namespace

RandomGraphModel constant_degree_sbm() {
  Matrix blocks(2, 2);
  blocks << 1.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0;
  PointMatrix centers(2, 1);
  centers << 0.0, 1.0;
  return {"sbm-constant-degree",
          LatentSpace::box(Vector::Constant(1, -0.25), Vector::Constant(1, 1.25), 1, "two communities on a line"),
          NodeDistribution::finite_mixture({1.0 / 3.0, 2.0 / 3.0}, centers, 0.2),
          Kernel::sbm_block(blocks, centers, {1.0, 5.0 / 9.0, 0.0, 2}),
          SignalFunction::constant(Vector::Ones(1)),
          SparsitySchedule::constant(1.0)};
}

std::vector<FixtureInfo> model_fixtures() {
  std::vector<FixtureInfo> out;
  for (const auto& [name, e] : registry()) out.push_back({name, e.description});
  return out;
}

RandomGraphModel make_model_fixture(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("unknown model fixture '" + name + "'");
  return it->second.make();
}

std::vector<FixtureInfo> deformation_fixtures() {
  return {{"translation", "constant shift along the first axis, tau(x) = t e_1"},
          {"scaling", "linear scaling, tau(x) = t x"},
          {"bump", "Gaussian bump contracting toward the box center, width 0.2 x diameter"}};
}

Deformation make_deformation_fixture(const std::string& name, const LatentSpace& space) {
  const int d = space.ambient_dimension;
  if (name == "translation") {
    Vector e = Vector::Zero(d);
    e[0] = 1.0;
    return Deformation::translation(e, 1.0);
  }
  if (name == "scaling") return Deformation::scaling(d, 1.0);
  if (name == "bump") {
    return Deformation::gaussian_bump(0.5 * (space.lower + space.upper), 0.2 * space.diameter(), 1.0);
  }
  throw ConfigError("unknown deformation fixture '" + name + "'");
}

}  // namespace rgcn
