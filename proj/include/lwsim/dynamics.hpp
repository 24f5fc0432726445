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

// Interacting particle systems on finite graphs: synchronous discrete-time
// updates driven by per-vertex noise, and Euler-Maruyama integration of
// interacting diffusions.
#ifndef LWSIM_DYNAMICS_HPP_
#define LWSIM_DYNAMICS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lwsim/graph.hpp"
#include "lwsim/random.hpp"

namespace lwsim {

// Read-only view of one vertex's path: `length` grid points of `dim` values.
class PathView {
 public:
  PathView(const double* data, int length, int dim)
      : data_(data), length_(length), dim_(dim) {}

  int length() const { return length_; }
  int dim() const { return dim_; }
  std::span<const double> at(int step) const {
    return {data_ + static_cast<std::size_t>(step) * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const double> back() const { return at(length_ - 1); }

 private:
  const double* data_;
  int length_;
  int dim_;
};

// The current states of a vertex's neighbours as an unordered collection.
// Consumers must not depend on the order of entries.
class NeighborBundle {
 public:
  NeighborBundle(std::span<const double> states, int dim)
      : states_(states), dim_(dim) {}

  int size() const { return dim_ == 0 ? 0 : static_cast<int>(states_.size()) / dim_; }
  bool empty() const { return states_.empty(); }
  int dim() const { return dim_; }
  std::span<const double> operator[](int i) const {
    return states_.subspan(static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_));
  }
  // Component c of every neighbour, sorted ascending.
  std::vector<double> SortedComponent(int c) const;

 private:
  std::span<const double> states_;
  int dim_;
};

// Per-vertex paths on a shared time grid.
struct TrajectorySet {
  MarkKind kind = MarkKind::kDiscrete;
  int dim = 1;
  int num_vertices = 0;
  std::vector<double> times;
  std::vector<double> data;  // [vertex][step][component]

  int length() const { return static_cast<int>(times.size()); }
  std::span<const double> at(int v, int step) const {
    return {data.data() + (static_cast<std::size_t>(v) * length() + step) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<double> at(int v, int step) {
    return {data.data() + (static_cast<std::size_t>(v) * length() + step) * dim,
            static_cast<std::size_t>(dim)};
  }
  PathView path(int v) const {
    return {data.data() + static_cast<std::size_t>(v) * length() * dim, length(), dim};
  }
  // Paths of the listed vertices, in that order.
  TrajectorySet Restrict(std::span<const int> vertices) const;

  friend bool operator==(const TrajectorySet&, const TrajectorySet&) = default;
};

struct DiscreteModel {
  std::string name;
  MarkKind kind = MarkKind::kDiscrete;
  int dim = 1;
  // X_v(k+1) from (k, X_v[0..k], neighbours' X(k), noise of (v, k+1)).
  std::function<void(int step, PathView own, const NeighborBundle& nbrs,
                     const NoiseDraw& noise, std::span<double> next)>
      update;
  // Rule for vertices without neighbours.
  std::function<void(int step, PathView own, const NoiseDraw& noise,
                     std::span<double> next)>
      isolated;
};

struct DiffusionModel {
  std::string name;
  int dim = 1;
  // Declared Lipschitz constant of (b, sigma); reported, never enforced.
  double lipschitz = 0.0;
  std::function<void(double t, std::span<const double> own,
                     const NeighborBundle& nbrs, std::span<double> drift)>
      drift;
  // d x d row-major diffusion matrix.
  std::function<void(double t, std::span<const double> own,
                     const NeighborBundle& nbrs, std::span<double> sigma)>
      sigma;
};

using Model = std::variant<DiscreteModel, DiffusionModel>;

// Number of grid steps and the step size (ignored by discrete models).
struct Horizon {
  int steps = 0;
  double dt = 1.0;

  static Horizon Discrete(int k) { return {k, 1.0}; }
  static Horizon Continuous(double t_end, double dt);
};

// Default noise keys: stream `seed`, labelled by vertex index.
std::vector<NoiseKey> DefaultNoiseKeys(int num_vertices, Seed seed);

TrajectorySet SimulateDiscrete(const Graph& g, const Marks& marks,
                               const DiscreteModel& model, int k_max,
                               std::span<const NoiseKey> noise);
TrajectorySet SimulateDiscrete(const Graph& g, const Marks& marks,
                               const DiscreteModel& model, int k_max, Seed seed);

// Throws NumericalError with the step index if a state becomes non-finite.
TrajectorySet SimulateDiffusion(const Graph& g, const Marks& marks,
                                const DiffusionModel& model, double t_end,
                                double dt, std::span<const NoiseKey> noise);
TrajectorySet SimulateDiffusion(const Graph& g, const Marks& marks,
                                const DiffusionModel& model, double t_end,
                                double dt, Seed seed);

TrajectorySet Simulate(const Graph& g, const Marks& marks, const Model& model,
                       const Horizon& horizon, std::span<const NoiseKey> noise);
TrajectorySet Simulate(const Graph& g, const Marks& marks, const Model& model,
                       const Horizon& horizon, Seed seed);

// ---------------------------------------------------------------------------
// Built-in models. All reduce over neighbours through sorted values, so
// permuting adjacency lists cannot change a single output bit.

// Copy the state of a uniformly chosen neighbour; isolated vertices hold.
DiscreteModel VoterModel();
// Binary majority of the neighbours (ties keep the own state), flipped with
// probability epsilon.
DiscreteModel NoisyMajorityModel(double epsilon);
// b = neighbour mean - own, sigma = sigma0 * I.
DiffusionModel ConsensusSdeModel(double sigma0, int dim = 1);
// Scalar: b = (K / |N_v|) sum_u sin(x_u - x_v), sigma = sigma0.
DiffusionModel KuramotoModel(double coupling, double sigma0);

using ModelParams = std::map<std::string, double>;

// Names: voter, noisy_majority {epsilon}, consensus_sde {sigma, dim},
// kuramoto {K, sigma}.
Model BuiltinModel(const std::string& name, const ModelParams& params = {});

// ---------------------------------------------------------------------------
// Initial conditions.

using InitSampler = std::function<Marks(const Graph&, Seed)>;

InitSampler IidBernoulliInit(double p);
InitSampler ConstantInit(Marks marks);
InitSampler ConstantValueInit(MarkKind kind, int dim, double value);
// i.i.d. N(mean, sd^2) per component, clamped to [-clamp, clamp].
InitSampler IidGaussianInit(int dim, double mean, double sd, double clamp);

// ---------------------------------------------------------------------------
// Noise-partition coupling.

struct CoupledTriple {
  TrajectorySet x;
  TrajectorySet y;
  TrajectorySet z;
  // 1 where d(v, A1) >= d(v, A2), the vertices where Y takes fresh noise.
  std::vector<char> near_second;
};

// X uses stream W everywhere. Y uses a fresh stream where d(v,A1) >= d(v,A2)
// and W elsewhere; Z uses W where d(v,A1) >= d(v,A2) and the fresh stream
// elsewhere. Unreachable vertices have infinite distance.
CoupledTriple CoupledSimulation(const Graph& g, const Marks& marks,
                                std::span<const int> a1, std::span<const int> a2,
                                const Model& model, const Horizon& horizon,
                                Seed seed);

// ---------------------------------------------------------------------------
// Covariance between functionals of separated regions.

using RegionFunctional =
    std::function<double(const TrajectorySet&, std::span<const int> region)>;

// Mean over the region of component 0 at the last grid point, clamped to
// [-bound, bound].
RegionFunctional FinalMeanFunctional(double bound = 1e300);

struct RegionPair {
  std::vector<int> a1;
  std::vector<int> a2;
  int distance = 0;
};

struct DecayPoint {
  int distance = 0;
  double covariance = 0.0;
  double ci_half_width = 0.0;
};

// Points ordered by strictly increasing distance.
struct DecayProfile {
  std::vector<DecayPoint> points;
  double z = 0.0;
  std::int64_t replicas = 0;
};

inline constexpr double kDefaultCiZ = 2.5758293035489;  // two-sided 99%

// Monte Carlo covariance of f(X_{A1}) and f(X_{A2}) per pair, with a normal
// approximation confidence half-width z * SE. Replica r draws its marks
// from DeriveSeed(seed, r, 0) and its noise stream from DeriveSeed(seed, r, 1).
DecayProfile CovarianceDecayProfile(const Graph& g, const InitSampler& init,
                                    const Model& model,
                                    std::span<const RegionPair> pairs,
                                    const RegionFunctional& f,
                                    const Horizon& horizon, std::int64_t replicas,
                                    Seed seed, double z = kDefaultCiZ,
                                    int threads = 1);

}  // namespace lwsim

#endif  // LWSIM_DYNAMICS_HPP_
