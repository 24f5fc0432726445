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

#include "lwsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lwsim/errors.hpp"
#include "lwsim/gibbs.hpp"
#include "lwsim/parallel.hpp"

namespace lwsim {
namespace {

void CheckMarks(const Graph& g, const Marks& marks, MarkKind kind, int dim) {
  if (marks.size() != g.num_vertices()) {
    throw InvalidArgument("marks length does not match vertex count");
  }
  if (marks.kind != kind || marks.dim != dim) {
    throw InvalidArgument("marks do not match the model's state kind");
  }
}

void CheckNoise(const Graph& g, std::span<const NoiseKey> noise) {
  if (static_cast<int>(noise.size()) != g.num_vertices()) {
    throw InvalidArgument("one noise key per vertex required");
  }
}

TrajectorySet Allocate(const Graph& g, const Marks& marks, int length) {
  TrajectorySet ts;
  ts.kind = marks.kind;
  ts.dim = marks.dim;
  ts.num_vertices = g.num_vertices();
  ts.times.resize(static_cast<std::size_t>(length));
  ts.data.assign(static_cast<std::size_t>(ts.num_vertices) * length * ts.dim, 0.0);
  for (int v = 0; v < ts.num_vertices; ++v) {
    const auto x = marks.at(v);
    std::copy(x.begin(), x.end(), ts.at(v, 0).begin());
  }
  return ts;
}

// Neighbour states at `step`, flattened.
void GatherNeighbors(const Graph& g, const TrajectorySet& ts, int v, int step,
                     std::vector<double>& buf) {
  buf.clear();
  for (int u : g.neighbors(v)) {
    const auto s = ts.at(u, step);
    buf.insert(buf.end(), s.begin(), s.end());
  }
}

double SortedSum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double x : values) s += x;
  return s;
}

}  // namespace

std::vector<double> NeighborBundle::SortedComponent(int c) const {
  std::vector<double> out(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) out[i] = (*this)[i][c];
  std::sort(out.begin(), out.end());
  return out;
}

TrajectorySet TrajectorySet::Restrict(std::span<const int> vertices) const {
  TrajectorySet out;
  out.kind = kind;
  out.dim = dim;
  out.num_vertices = static_cast<int>(vertices.size());
  out.times = times;
  out.data.reserve(vertices.size() * times.size() * static_cast<std::size_t>(dim));
  for (int v : vertices) {
    if (v < 0 || v >= num_vertices) throw InvalidArgument("vertex out of range");
    const auto first = data.begin() + static_cast<std::ptrdiff_t>(v) * length() * dim;
    out.data.insert(out.data.end(), first, first + static_cast<std::ptrdiff_t>(length()) * dim);
  }
  return out;
}

Horizon Horizon::Continuous(double t_end, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  if (!(t_end >= dt)) throw InvalidArgument("horizon T must be >= dt");
  const double ratio = t_end / dt;
  const auto steps = static_cast<int>(std::ceil(ratio - 1e-9));
  return {steps, dt};
}

std::vector<NoiseKey> DefaultNoiseKeys(int num_vertices, Seed seed) {
  std::vector<NoiseKey> keys(static_cast<std::size_t>(num_vertices));
  for (int v = 0; v < num_vertices; ++v) keys[v] = {seed, static_cast<std::uint64_t>(v)};
  return keys;
}

TrajectorySet SimulateDiscrete(const Graph& g, const Marks& marks,
                               const DiscreteModel& model, int k_max,
                               std::span<const NoiseKey> noise) {
  if (k_max < 0) throw InvalidArgument("k_max must be >= 0");
  CheckMarks(g, marks, model.kind, model.dim);
  CheckNoise(g, noise);
  TrajectorySet ts = Allocate(g, marks, k_max + 1);
  std::iota(ts.times.begin(), ts.times.end(), 0.0);
  std::vector<double> buf;
  for (int k = 0; k < k_max; ++k) {
    for (int v = 0; v < ts.num_vertices; ++v) {
      const PathView own(ts.path(v).at(0).data(), k + 1, ts.dim);
      const NoiseDraw draw(noise[v], static_cast<std::uint32_t>(k + 1));
      const auto next = ts.at(v, k + 1);
      if (g.degree(v) == 0) {
        model.isolated(k, own, draw, next);
      } else {
        GatherNeighbors(g, ts, v, k, buf);
        model.update(k, own, NeighborBundle(buf, ts.dim), draw, next);
      }
    }
  }
  return ts;
}

TrajectorySet SimulateDiscrete(const Graph& g, const Marks& marks,
                               const DiscreteModel& model, int k_max, Seed seed) {
  const auto keys = DefaultNoiseKeys(g.num_vertices(), seed);
  return SimulateDiscrete(g, marks, model, k_max, keys);
}

TrajectorySet SimulateDiffusion(const Graph& g, const Marks& marks,
                                const DiffusionModel& model, double t_end,
                                double dt, std::span<const NoiseKey> noise) {
  const Horizon h = Horizon::Continuous(t_end, dt);
  CheckMarks(g, marks, MarkKind::kVector, model.dim);
  CheckNoise(g, noise);
  TrajectorySet ts = Allocate(g, marks, h.steps + 1);
  for (int i = 0; i <= h.steps; ++i) ts.times[i] = i * dt;
  const int d = model.dim;
  const double sqrt_dt = std::sqrt(dt);
  std::vector<double> buf;
  std::vector<double> drift(static_cast<std::size_t>(d));
  std::vector<double> sigma(static_cast<std::size_t>(d) * d);
  std::vector<double> z(static_cast<std::size_t>(d));
  for (int i = 0; i < h.steps; ++i) {
    const double t = ts.times[i];
    for (int v = 0; v < ts.num_vertices; ++v) {
      GatherNeighbors(g, ts, v, i, buf);
      const NeighborBundle nb(buf, d);
      const auto own = ts.at(v, i);
      model.drift(t, own, nb, drift);
      model.sigma(t, own, nb, sigma);
      const NoiseDraw draw(noise[v], static_cast<std::uint32_t>(i + 1));
      for (int c = 0; c < d; ++c) z[c] = draw.Normal(static_cast<std::uint32_t>(c));
      const auto next = ts.at(v, i + 1);
      for (int r = 0; r < d; ++r) {
        double diffusion = 0.0;
        for (int c = 0; c < d; ++c) diffusion += sigma[static_cast<std::size_t>(r) * d + c] * z[c];
        next[r] = own[r] + drift[r] * dt + diffusion * sqrt_dt;
        if (!std::isfinite(next[r])) {
          throw NumericalError("non-finite state at vertex " + std::to_string(v), i + 1);
        }
      }
    }
  }
  return ts;
}

TrajectorySet SimulateDiffusion(const Graph& g, const Marks& marks,
                                const DiffusionModel& model, double t_end,
                                double dt, Seed seed) {
  const auto keys = DefaultNoiseKeys(g.num_vertices(), seed);
  return SimulateDiffusion(g, marks, model, t_end, dt, keys);
}

TrajectorySet Simulate(const Graph& g, const Marks& marks, const Model& model,
                       const Horizon& horizon, std::span<const NoiseKey> noise) {
  if (const auto* dm = std::get_if<DiscreteModel>(&model)) {
    return SimulateDiscrete(g, marks, *dm, horizon.steps, noise);
  }
  const auto& cm = std::get<DiffusionModel>(model);
  return SimulateDiffusion(g, marks, cm, horizon.steps * horizon.dt, horizon.dt, noise);
}

TrajectorySet Simulate(const Graph& g, const Marks& marks, const Model& model,
                       const Horizon& horizon, Seed seed) {
  const auto keys = DefaultNoiseKeys(g.num_vertices(), seed);
  return Simulate(g, marks, model, horizon, keys);
}

// ---------------------------------------------------------------------------

DiscreteModel VoterModel() {
  DiscreteModel m;
  m.name = "voter";
  m.update = [](int, PathView, const NeighborBundle& nbrs, const NoiseDraw& noise,
                std::span<double> next) {
    const auto sorted = nbrs.SortedComponent(0);
    const int n = static_cast<int>(sorted.size());
    const int pick = std::min(n - 1, static_cast<int>(noise.Uniform() * n));
    next[0] = sorted[pick];
  };
  m.isolated = [](int, PathView own, const NoiseDraw&, std::span<double> next) {
    next[0] = own.back()[0];
  };
  return m;
}

DiscreteModel NoisyMajorityModel(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument("noisy_majority: epsilon must lie in [0, 1]");
  }
  DiscreteModel m;
  m.name = "noisy_majority";
  auto rule = [epsilon](double own, int ones, int zeros, const NoiseDraw& noise) {
    double majority = own;
    if (ones > zeros) majority = 1.0;
    if (zeros > ones) majority = 0.0;
    return noise.Uniform() < epsilon ? 1.0 - majority : majority;
  };
  m.update = [rule](int, PathView own, const NeighborBundle& nbrs,
                    const NoiseDraw& noise, std::span<double> next) {
    int ones = 0;
    for (int i = 0; i < nbrs.size(); ++i) ones += nbrs[i][0] != 0.0 ? 1 : 0;
    next[0] = rule(own.back()[0], ones, nbrs.size() - ones, noise);
  };
  m.isolated = [rule](int, PathView own, const NoiseDraw& noise, std::span<double> next) {
    next[0] = rule(own.back()[0], 0, 0, noise);
  };
  return m;
}

DiffusionModel ConsensusSdeModel(double sigma0, int dim) {
  if (dim < 1) throw InvalidArgument("consensus_sde: dim must be >= 1");
  DiffusionModel m;
  m.name = "consensus_sde";
  m.dim = dim;
  m.lipschitz = 2.0;
  m.drift = [](double, std::span<const double> own, const NeighborBundle& nbrs,
               std::span<double> drift) {
    for (std::size_t c = 0; c < own.size(); ++c) {
      if (nbrs.empty()) {
        drift[c] = 0.0;
      } else {
        drift[c] = SortedSum(nbrs.SortedComponent(static_cast<int>(c))) / nbrs.size() - own[c];
      }
    }
  };
  m.sigma = [sigma0, dim](double, std::span<const double>, const NeighborBundle&,
                          std::span<double> s) {
    std::fill(s.begin(), s.end(), 0.0);
    for (int c = 0; c < dim; ++c) s[static_cast<std::size_t>(c) * dim + c] = sigma0;
  };
  return m;
}

DiffusionModel KuramotoModel(double coupling, double sigma0) {
  DiffusionModel m;
  m.name = "kuramoto";
  m.dim = 1;
  m.lipschitz = 2.0 * std::abs(coupling);
  m.drift = [coupling](double, std::span<const double> own,
                       const NeighborBundle& nbrs, std::span<double> drift) {
    if (nbrs.empty()) {
      drift[0] = 0.0;
      return;
    }
    std::vector<double> terms(static_cast<std::size_t>(nbrs.size()));
    for (int i = 0; i < nbrs.size(); ++i) terms[i] = std::sin(nbrs[i][0] - own[0]);
    drift[0] = coupling * SortedSum(std::move(terms)) / nbrs.size();
  };
  m.sigma = [sigma0](double, std::span<const double>, const NeighborBundle&,
                     std::span<double> s) { s[0] = sigma0; };
  return m;
}

Model BuiltinModel(const std::string& name, const ModelParams& params) {
  auto get = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "voter") return VoterModel();
  if (name == "noisy_majority") return NoisyMajorityModel(get("epsilon", 0.0));
  if (name == "consensus_sde") {
    return ConsensusSdeModel(get("sigma", 1.0), static_cast<int>(get("dim", 1.0)));
  }
  if (name == "kuramoto") return KuramotoModel(get("K", 1.0), get("sigma", 1.0));
  throw InvalidArgument("unknown model '" + name + "'");
}

// ---------------------------------------------------------------------------

InitSampler IidBernoulliInit(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("Bernoulli p must lie in [0, 1]");
  return [p](const Graph& g, Seed seed) {
    const std::vector<double> lambda{1.0 - p, p};
    return Marks::Discrete(IidSample(g, lambda, seed));
  };
}

InitSampler ConstantInit(Marks marks) {
  return [marks = std::move(marks)](const Graph& g, Seed) {
    if (marks.size() != g.num_vertices()) {
      throw InvalidArgument("constant init: marks length does not match graph");
    }
    return marks;
  };
}

InitSampler ConstantValueInit(MarkKind kind, int dim, double value) {
  return [kind, dim, value](const Graph& g, Seed) {
    Marks m;
    m.kind = kind;
    m.dim = dim;
    m.values.assign(static_cast<std::size_t>(g.num_vertices()) * dim, value);
    return m;
  };
}

InitSampler IidGaussianInit(int dim, double mean, double sd, double clamp) {
  return [=](const Graph& g, Seed seed) {
    CounterRng rng(seed);
    std::vector<double> v(static_cast<std::size_t>(g.num_vertices()) * dim);
    for (double& x : v) x = std::clamp(mean + sd * rng.Normal(), -clamp, clamp);
    return Marks::Vector(dim, std::move(v));
  };
}

// ---------------------------------------------------------------------------

CoupledTriple CoupledSimulation(const Graph& g, const Marks& marks,
                                std::span<const int> a1, std::span<const int> a2,
                                const Model& model, const Horizon& horizon,
                                Seed seed) {
  if (a1.empty() || a2.empty()) throw InvalidArgument("coupling: empty region");
  const auto d1 = BfsDistances(g, a1);
  const auto d2 = BfsDistances(g, a2);
  constexpr int kFar = std::numeric_limits<int>::max();
  const Seed w = DeriveSeed(seed, 0);
  const Seed fresh = DeriveSeed(seed, 1);
  const int n = g.num_vertices();
  CoupledTriple out;
  out.near_second.resize(static_cast<std::size_t>(n));
  std::vector<NoiseKey> kx(static_cast<std::size_t>(n)), ky(kx), kz(kx);
  for (int v = 0; v < n; ++v) {
    const int x1 = d1[v] < 0 ? kFar : d1[v];
    const int x2 = d2[v] < 0 ? kFar : d2[v];
    const bool near2 = x1 >= x2;
    out.near_second[v] = near2 ? 1 : 0;
    const auto label = static_cast<std::uint64_t>(v);
    kx[v] = {w, label};
    ky[v] = {near2 ? fresh : w, label};
    kz[v] = {near2 ? w : fresh, label};
  }
  out.x = Simulate(g, marks, model, horizon, kx);
  out.y = Simulate(g, marks, model, horizon, ky);
  out.z = Simulate(g, marks, model, horizon, kz);
  return out;
}

RegionFunctional FinalMeanFunctional(double bound) {
  return [bound](const TrajectorySet& ts, std::span<const int> region) {
    double s = 0.0;
    for (int v : region) s += ts.at(v, ts.length() - 1)[0];
    return std::clamp(s / static_cast<double>(region.size()), -bound, bound);
  };
}

DecayProfile CovarianceDecayProfile(const Graph& g, const InitSampler& init,
                                    const Model& model,
                                    std::span<const RegionPair> pairs,
                                    const RegionFunctional& f,
                                    const Horizon& horizon, std::int64_t replicas,
                                    Seed seed, double z, int threads) {
  if (replicas < 100) throw InvalidArgument("covariance profile needs >= 100 replicas");
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pairs[a].distance < pairs[b].distance;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (pairs[order[i]].distance == pairs[order[i - 1]].distance) {
      throw InvalidArgument("covariance profile: repeated distance");
    }
  }
  for (const auto& p : pairs) {
    if (p.a1.empty() || p.a2.empty()) throw InvalidArgument("covariance profile: empty region");
  }
  const std::size_t np = pairs.size();
  // values[r][2p + side]
  std::vector<double> values(static_cast<std::size_t>(replicas) * np * 2);
  ParallelFor(static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
    const Marks marks = init(g, DeriveSeed(seed, r, 0));
    const TrajectorySet ts = Simulate(g, marks, model, horizon, DeriveSeed(seed, r, 1));
    for (std::size_t p = 0; p < np; ++p) {
      values[(r * np + p) * 2] = f(ts, pairs[p].a1);
      values[(r * np + p) * 2 + 1] = f(ts, pairs[p].a2);
    }
  });
  DecayProfile prof;
  prof.z = z;
  prof.replicas = replicas;
  const double rn = static_cast<double>(replicas);
  for (std::size_t idx : order) {
    double m1 = 0.0, m2 = 0.0;
    for (std::int64_t r = 0; r < replicas; ++r) {
      m1 += values[(r * np + idx) * 2];
      m2 += values[(r * np + idx) * 2 + 1];
    }
    m1 /= rn;
    m2 /= rn;
    double cov = 0.0, sq = 0.0;
    for (std::int64_t r = 0; r < replicas; ++r) {
      const double prod = (values[(r * np + idx) * 2] - m1) *
                          (values[(r * np + idx) * 2 + 1] - m2);
      cov += prod;
      sq += prod * prod;
    }
    const double mean_prod = cov / rn;
    const double var_prod = std::max(0.0, sq / rn - mean_prod * mean_prod);
    prof.points.push_back({pairs[idx].distance, cov / (rn - 1.0),
                           z * std::sqrt(var_prod / rn)});
  }
  return prof;
}

}  // namespace lwsim
