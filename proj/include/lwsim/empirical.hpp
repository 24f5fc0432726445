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

// Empirical measures of trajectories, distances between them, and the Monte
// Carlo estimators built on top: limit root laws, giant components,
// component-level functionals, and shift averages on lattice boxes.
#ifndef LWSIM_EMPIRICAL_HPP_
#define LWSIM_EMPIRICAL_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lwsim/dynamics.hpp"
#include "lwsim/graph.hpp"
#include "lwsim/random.hpp"

namespace lwsim {

// Equally weighted trajectory samples on a shared time grid.
struct EmpiricalMeasure {
  MarkKind kind = MarkKind::kDiscrete;
  int dim = 1;
  std::vector<double> times;
  std::vector<double> data;  // [sample][step][component]

  int length() const { return static_cast<int>(times.size()); }
  std::size_t path_size() const { return times.size() * static_cast<std::size_t>(dim); }
  std::int64_t size() const {
    return path_size() == 0 ? 0 : static_cast<std::int64_t>(data.size() / path_size());
  }
  double weight() const { return 1.0 / static_cast<double>(size()); }
  std::span<const double> sample(std::int64_t i) const {
    return {data.data() + static_cast<std::size_t>(i) * path_size(), path_size()};
  }
  PathView path(std::int64_t i) const { return {sample(i).data(), length(), dim}; }

  // Appends all samples of `other`, which must share kind, dim and grid.
  void Append(const EmpiricalMeasure& other);
};

EmpiricalMeasure GlobalEmpirical(const TrajectorySet& ts);

// Empirical measure over the vertices comp.origin of the trajectory set.
EmpiricalMeasure ComponentEmpirical(const TrajectorySet& ts, const RootedGraph& comp);

// Exact total variation between the histograms of whole paths.
double TvDiscrete(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

inline constexpr int kDefaultW1Samples = 256;

// Average matched sup-norm distance over [0, t] under an optimal assignment
// between equal-size subsamples of a and b. Both subsamples are drawn with
// the same seed, so identical inputs give identical subsamples.
double Wasserstein1Paths(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                         double t, int max_samples = kDefaultW1Samples,
                         Seed seed = 0);

// Trees for limit-law Monte Carlo; `depth` is the truncation depth.
using TreeSampler = std::function<RootedGraph(Seed)>;

// Root trajectories of `replicas` independent (tree, marks, dynamics) draws.
// Replica r uses DeriveSeed(seed, r, 0..2) for tree, marks and noise.
EmpiricalMeasure RootLawMonteCarlo(const TreeSampler& trees, const InitSampler& init,
                                   const Model& model, const Horizon& horizon,
                                   std::int64_t replicas, Seed seed, int threads = 1);

struct DepthSensitivity {
  int depth = 0;
  EmpiricalMeasure base;
  EmpiricalMeasure deeper;  // depth + 2
  double w1_shift = 0.0;
};

// Root law at truncation depth D and D + 2, with the W1 distance between the
// two estimates over the whole horizon. Intended for diffusions, whose root
// law is only approximately local.
DepthSensitivity RootLawDepthSensitivity(
    const std::function<RootedGraph(int depth, Seed)>& trees, int depth,
    const InitSampler& init, const Model& model, const Horizon& horizon,
    std::int64_t replicas, Seed seed, int threads = 1);

using GraphSampler = std::function<Graph(Seed)>;

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

// |C_max| / n over replicas; replica r uses graph seed DeriveSeed(seed, r).
MeanStderr GiantFraction(const GraphSampler& graphs, std::int64_t replicas,
                         Seed seed, int threads = 1);

// Functional of a single trajectory.
using PathFunctional = std::function<double(PathView)>;

// Value at the last grid point of component 0.
PathFunctional FinalStateFunctional();

struct ComponentDraw {
  double value = 0.0;       // <mu^{C}, f> for the root's component C
  bool in_largest = false;  // C is the largest component of the graph
  int component_size = 0;
};

struct ComponentDraws {
  std::vector<ComponentDraw> draws;
  // Paths of the largest component, pooled over the first draws whose root
  // landed in it (at most `pool_largest` graphs).
  EmpiricalMeasure largest;
  int largest_graphs = 0;
};

// Per draw r: graph from DeriveSeed(seed, r, 0), marks on the whole graph
// from DeriveSeed(seed, r, 1), a uniform root from DeriveSeed(seed, r, 2) and
// dynamics on the root's component with noise stream DeriveSeed(seed, r, 3)
// labelled by original vertex, which is exactly the restriction of the
// whole-graph dynamics.
ComponentDraws ComponentFunctionalDistribution(
    const GraphSampler& graphs, const InitSampler& init, const Model& model,
    const PathFunctional& f, const Horizon& horizon, std::int64_t root_draws,
    Seed seed, int threads = 1, int pool_largest = 0);

// <mu^{T}, f> over whole (finite) sampled trees.
std::vector<double> TreeFunctionalSample(const TreeSampler& trees,
                                         const InitSampler& init,
                                         const Model& model,
                                         const PathFunctional& f,
                                         const Horizon& horizon,
                                         std::int64_t draws, Seed seed,
                                         int threads = 1);

// f(tau_a X) for a lattice site a (given as a vertex index of `box`); it may
// read states within l-infinity distance w of a.
using LocalFunctional =
    std::function<double(const TrajectorySet&, const LatticeBox&, int site)>;

// Mean over the window of radius w of component 0 at the last grid point.
LocalFunctional WindowMeanFunctional(int w);
// 1{X_a = X_{a + w e_1}} at the last grid point. For an i.i.d. field these
// indicators are pairwise uncorrelated across sites.
LocalFunctional AgreementFunctional(int w);

// For each m, the average of f over the centred box B_m with coordinates
// -floor(m/2) .. m - floor(m/2) - 1 per axis. Throws SizeLimitError if a box
// widened by w leaves the lattice.
std::vector<double> ShiftAverage(const TrajectorySet& ts, const LatticeBox& box,
                                 const LocalFunctional& f, int w,
                                 std::span<const int> box_sizes);

struct VariancePoint {
  int box_size = 0;
  double variance = 0.0;
};

// averages[r][i] is replica r's shift average over box_sizes[i].
std::vector<VariancePoint> ErgodicityVarianceCurve(
    const std::vector<std::vector<double>>& averages,
    std::span<const int> box_sizes);

}  // namespace lwsim

#endif  // LWSIM_EMPIRICAL_HPP_
