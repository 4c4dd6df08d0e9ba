#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rgcn/config.hpp"
#include "rgcn/experiments.hpp"
#include "rgcn/fixtures.hpp"
#include "rgcn/gcn.hpp"
#include "rgcn/graph.hpp"
#include "rgcn/metrics.hpp"

namespace py = pybind11;

namespace {

using EdgeArray = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 2, Eigen::RowMajor>;

EdgeArray edge_array(const rgcn::SampledGraph& g) {
  EdgeArray e(static_cast<Eigen::Index>(g.edges.size()), 2);
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    e(static_cast<Eigen::Index>(k), 0) = g.edges[k].first;
    e(static_cast<Eigen::Index>(k), 1) = g.edges[k].second;
  }
  return e;
}

rgcn::GcnParams network(const std::vector<int>& widths, int order, std::uint64_t seed, const std::string& activation,
                        double bias_std) {
  rgcn::InitPolicy policy;
  policy.activation = rgcn::parse_activation(activation);
  policy.bias_std = bias_std;
  return rgcn::random_init(widths, order, seed, policy);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random-graph GCN convergence and stability toolkit";

  static py::exception<rgcn::NumericalPrecondition> numerical(m, "NumericalPreconditionError", PyExc_RuntimeError);
  static py::exception<rgcn::CapacityError> capacity(m, "CapacityError", PyExc_MemoryError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const rgcn::ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const rgcn::ShapeError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const rgcn::NumericalPrecondition& e) {
      py::set_error(numerical, e.what());
    } catch (const rgcn::CapacityError& e) {
      py::set_error(capacity, e.what());
    }
  });

  m.def("model_fixtures", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : rgcn::model_fixtures()) out.emplace_back(f.name, f.description);
    return out;
  });
  m.def("scenario_names", &rgcn::scenario_names);

  m.def(
      "sample_graph",
      [](const std::string& model, std::size_t n, std::uint64_t seed) {
        const auto g = rgcn::sample_graph(rgcn::make_model_fixture(model), n, seed);
        py::dict d;
        d["n"] = g.n;
        d["edges"] = edge_array(g);
        d["latents"] = g.latents;
        d["signals"] = g.signals;
        d["alpha"] = g.alpha_n;
        return d;
      },
      py::arg("model"), py::arg("n"), py::arg("seed"),
      "Sample a graph from a named model fixture. Edges are (i, j) rows with i < j.");

  m.def(
      "forward",
      [](const std::string& model, std::size_t n, std::uint64_t seed, const std::vector<int>& widths, int order,
         std::uint64_t network_seed, const std::string& activation, double bias_std) {
        const auto g = rgcn::sample_graph(rgcn::make_model_fixture(model), n, seed);
        const auto params = network(widths, order, network_seed, activation, bias_std);
        const auto lap = rgcn::build_laplacian(g);
        const rgcn::Matrix out = rgcn::forward_equivariant(params, lap, g.signals);
        const rgcn::Vector pooled = out.colwise().mean().transpose();
        return py::make_tuple(out, pooled);
      },
      py::arg("model"), py::arg("n"), py::arg("seed"), py::arg("widths"), py::arg("order") = 2,
      py::arg("network_seed") = 1, py::arg("activation") = "relu", py::arg("bias_std") = 0.0,
      "Random GCN on a sampled graph: (equivariant n x d_out output, invariant mean).");

  m.def(
      "forward_edges",
      [](std::size_t n, const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& edges,
         const rgcn::Matrix& signals, const std::vector<int>& widths, int order, std::uint64_t network_seed,
         const std::string& activation, double bias_std) {
        if (edges.ndim() != 2 || edges.shape(1) != 2) throw rgcn::ShapeError("edges must have shape (m, 2)");
        const auto e = edges.unchecked<2>();
        std::vector<std::pair<std::int64_t, std::int64_t>> list;
        for (py::ssize_t k = 0; k < e.shape(0); ++k) list.emplace_back(e(k, 0), e(k, 1));
        const auto g = rgcn::graph_from_edges(n, std::move(list));
        const auto params = network(widths, order, network_seed, activation, bias_std);
        return rgcn::forward_equivariant(params, g, signals);
      },
      py::arg("n"), py::arg("edges"), py::arg("signals"), py::arg("widths"), py::arg("order") = 2,
      py::arg("network_seed") = 1, py::arg("activation") = "relu", py::arg("bias_std") = 0.0);

  m.def(
      "mse_sigma_exact",
      [](const rgcn::Matrix& z1, const rgcn::Matrix& z2) {
        const auto r = rgcn::mse_sigma_exact(z1, z2);
        return py::make_tuple(r.value, r.permutation);
      },
      py::arg("z1"), py::arg("z2"), "Permutation-minimized RMS distance and the optimal permutation.");

  m.def(
      "wasserstein2",
      [](const rgcn::Matrix& p1, const rgcn::Matrix& p2) {
        const auto r = rgcn::wasserstein2_empirical(p1, p2);
        return py::make_tuple(r.value, r.exact);
      },
      py::arg("points1"), py::arg("points2"), "Empirical W2 distance and whether it was solved exactly.");

  m.def(
      "describe_config", [](const std::string& text) { return rgcn::describe(rgcn::parse_config_text(text)); },
      py::arg("text"));

  m.def(
      "run_config",
      [](const std::string& text, int jobs) {
        const auto config = rgcn::parse_config_text(text);
        rgcn::ResultTable table;
        {
          py::gil_scoped_release release;
          table = rgcn::run_scenario(config, {jobs});
        }
        return table.to_csv();
      },
      py::arg("text"), py::arg("jobs") = 1, "Run the scenario of an INI config and return the results CSV.");
}
