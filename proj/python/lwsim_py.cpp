// Copyright 2026 The lwsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python bindings: graphs, limit-tree quantities, simulation and the
// config-driven experiments.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lwsim/dynamics.hpp"
#include "lwsim/experiments.hpp"
#include "lwsim/graph.hpp"
#include "lwsim/limit_trees.hpp"
#include "lwsim/local_topology.hpp"

namespace py = pybind11;

namespace lwsim {
namespace {

using RootedPair = std::pair<Graph, int>;

RootedPair ToPair(const RootedGraph& rg) { return {rg.graph, rg.root}; }

RootedGraph FromPair(const Graph& g, int root) {
  if (root < 0 || root >= g.num_vertices()) throw InvalidArgument("root out of range");
  return ComponentOf(g, root);
}

py::array_t<double> TrajectoryArray(const TrajectorySet& ts) {
  py::array_t<double> out({static_cast<py::ssize_t>(ts.num_vertices),
                           static_cast<py::ssize_t>(ts.length()),
                           static_cast<py::ssize_t>(ts.dim)});
  std::copy(ts.data.begin(), ts.data.end(), out.mutable_data());
  return out;
}

py::dict DualityDict(const DualityReport& r) {
  py::dict d;
  d["m"] = r.m;
  d["theta"] = r.theta;
  d["survival"] = r.survival;
  d["alpha"] = r.alpha;
  d["beta"] = r.beta;
  d["dual"] = r.dual.probabilities();
  d["dual_theta"] = r.dual_theta;
  d["dual_mass"] = r.dual_mass;
  return d;
}

// Runs a named experiment on a JSON config string; returns (pass, summary
// JSON string).
std::pair<bool, std::string> RunExperiment(const std::string& name,
                                           const std::string& config_json, Seed seed,
                                           int threads) {
  Json config;
  try {
    config = config_json.empty() ? Json::object() : Json::parse(config_json);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(std::string("config JSON: ") + e.what());
  }
  const RunContext ctx{seed, threads};
  ExperimentResult r;
  py::gil_scoped_release release;
  if (name == "graph-gen") {
    r = RunGraphGen(config, ctx).result;
  } else if (name == "duality") {
    r = RunDuality(config, ctx);
  } else if (name == "lwc-test") {
    r = RunLwcTest(config, ctx);
  } else if (name == "emp-test") {
    r = RunEmpTest(config, ctx);
  } else if (name == "comp-emp-test") {
    r = RunCompEmpTest(config, ctx);
  } else if (name == "corr-decay") {
    r = RunCorrDecay(config, ctx);
  } else if (name == "tree-counterexample") {
    r = RunTreeCounterexample(config, ctx);
  } else if (name == "lattice-test") {
    r = RunLatticeTest(config, ctx);
  } else if (name == "ergodicity") {
    r = RunErgodicity(config, ctx);
  } else if (name == "gibbs-check") {
    r = RunGibbsCheck(config, ctx);
  } else if (name == "integrator-check") {
    r = RunIntegratorCheck(config, ctx);
  } else {
    throw InvalidArgument("unknown experiment '" + name + "'");
  }
  return {r.pass, r.summary.dump()};
}

}  // namespace
}  // namespace lwsim

PYBIND11_MODULE(_lwsim, m) {
  using namespace lwsim;
  m.doc() = "Local weak convergence simulator";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Graph>(m, "Graph")
      .def(py::init([](int n, const std::vector<Edge>& edges) {
             return Graph::FromEdges(n, edges);
           }),
           py::arg("num_vertices"), py::arg("edges"))
      .def_property_readonly("num_vertices", &Graph::num_vertices)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def("edges", &Graph::edges)
      .def("degrees", &Graph::degrees)
      .def("degree", &Graph::degree)
      .def("neighbors",
           [](const Graph& g, int v) {
             if (v < 0 || v >= g.num_vertices()) throw py::index_error("vertex out of range");
             const auto s = g.neighbors(v);
             return std::vector<int>(s.begin(), s.end());
           })
      .def("has_edge", &Graph::has_edge)
      .def("to_edge_list",
           [](const Graph& g, std::optional<int> root) { return EdgeListString(g, root); },
           py::arg("root") = py::none())
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "<Graph n=" + std::to_string(g.num_vertices()) +
               " m=" + std::to_string(g.num_edges()) + ">";
      });

  m.def("erdos_renyi", &GenErdosRenyi, py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("gnm", &GenGnm, py::arg("n"), py::arg("m"), py::arg("seed"));
  m.def(
      "random_regular",
      [](int n, int k, Seed seed) { return GenRandomRegular(n, k, seed).graph; },
      py::arg("n"), py::arg("k"), py::arg("seed"));
  m.def(
      "lattice_box", [](int dim, int n) { return ToPair(GenLatticeBox(dim, n)); },
      py::arg("dim"), py::arg("n"), "Box [-n, n]^dim; returns (graph, root).");
  m.def(
      "regular_tree", [](int k, int height) { return ToPair(GenRegularTree(k, height)); },
      py::arg("k"), py::arg("height"), "Returns (graph, root).");
  m.def(
      "ugw_tree",
      [](const std::string& rho, int depth, Seed seed) {
        return ToPair(SampleUgw(DegreeDist::Parse(rho), depth, seed).tree);
      },
      py::arg("rho"), py::arg("depth"), py::arg("seed"));
  m.def("component_labels", &ComponentLabels, py::arg("graph"));

  m.def(
      "canonical_code",
      [](const Graph& g, int root) { return py::bytes(CanonicalCode(FromPair(g, root))); },
      py::arg("graph"), py::arg("root"),
      "Isomorphism-invariant code of the root's component.");
  m.def(
      "ball_code",
      [](const Graph& g, int root, int r) {
        return py::bytes(CanonicalCode(Ball(g, root, r)));
      },
      py::arg("graph"), py::arg("root"), py::arg("radius"));

  m.def(
      "survival_prob",
      [](const std::string& rho) { return SurvivalProb(DegreeDist::Parse(rho)); },
      py::arg("rho"));
  m.def("poisson_dual", &PoissonDual, py::arg("theta"));
  m.def(
      "duality",
      [](const std::string& rho) { return DualityDict(DualDistribution(DegreeDist::Parse(rho))); },
      py::arg("rho"));

  m.def(
      "simulate",
      [](const Graph& g, const std::vector<double>& init, int dim, const std::string& model,
         const ModelParams& params, std::optional<int> steps, std::optional<double> t,
         double dt, Seed seed) {
        const Model mdl = BuiltinModel(model, params);
        const bool discrete = std::holds_alternative<DiscreteModel>(mdl);
        Horizon h;
        if (discrete) {
          if (!steps) throw InvalidArgument("discrete models need steps");
          h = Horizon::Discrete(*steps);
        } else {
          if (!t) throw InvalidArgument("diffusion models need t");
          h = Horizon::Continuous(*t, dt);
        }
        Marks marks = Marks::Vector(dim, init);
        if (discrete) marks.kind = MarkKind::kDiscrete;
        if (marks.size() != g.num_vertices() ||
            init.size() != static_cast<std::size_t>(dim) * g.num_vertices()) {
          throw InvalidArgument("init must hold dim values per vertex");
        }
        TrajectorySet ts;
        {
          py::gil_scoped_release release;
          ts = Simulate(g, marks, mdl, h, seed);
        }
        return TrajectoryArray(ts);
      },
      py::arg("graph"), py::arg("init"), py::arg("dim") = 1, py::arg("model") = "voter",
      py::arg("params") = ModelParams{}, py::arg("steps") = py::none(),
      py::arg("t") = py::none(), py::arg("dt") = 1e-3, py::arg("seed") = 0,
      "Trajectories as an array of shape (vertices, grid points, dim).");

  m.def(
      "default_config", [](const std::string& name) { return DefaultConfig(name).dump(); },
      py::arg("name"));
  m.def("run_experiment", &RunExperiment, py::arg("name"), py::arg("config") = "",
        py::arg("seed") = 0, py::arg("threads") = 1);
}
