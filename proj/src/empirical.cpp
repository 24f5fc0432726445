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

#include "lwsim/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <string>

#include "lwsim/assignment.hpp"
#include "lwsim/errors.hpp"
#include "lwsim/parallel.hpp"
#include "lwsim/stats.hpp"

namespace lwsim {
namespace {

EmpiricalMeasure EmptyLike(const TrajectorySet& ts) {
  EmpiricalMeasure m;
  m.kind = ts.kind;
  m.dim = ts.dim;
  m.times = ts.times;
  return m;
}

void AppendPath(EmpiricalMeasure& m, const TrajectorySet& ts, int v) {
  const auto first = ts.data.begin() +
                     static_cast<std::ptrdiff_t>(v) * ts.length() * ts.dim;
  m.data.insert(m.data.end(), first,
                first + static_cast<std::ptrdiff_t>(ts.length()) * ts.dim);
}

void CheckCompatible(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.kind != b.kind || a.dim != b.dim) {
    throw InvalidArgument("empirical measures of different state kinds");
  }
  if (a.times != b.times) throw InvalidArgument("empirical measures on different time grids");
  if (a.size() == 0 || b.size() == 0) throw InvalidArgument("empty empirical measure");
}

std::vector<std::int64_t> Subsample(std::int64_t size, int count, Seed seed) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(size));
  std::iota(idx.begin(), idx.end(), 0);
  if (count >= size) return idx;
  CounterRng rng(seed);
  for (int i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::int64_t>(rng.UniformInt(static_cast<std::uint64_t>(size - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(count));
  return idx;
}

// Root's path from one replica, written by index so that the merge order is
// fixed.
struct Slot {
  std::vector<double> path;
  std::vector<double> times;
  MarkKind kind = MarkKind::kDiscrete;
  int dim = 1;
};

EmpiricalMeasure MergeSlots(std::vector<Slot>& slots) {
  EmpiricalMeasure m;
  if (slots.empty()) return m;
  m.kind = slots[0].kind;
  m.dim = slots[0].dim;
  m.times = slots[0].times;
  m.data.reserve(slots.size() * m.path_size());
  for (auto& s : slots) {
    m.data.insert(m.data.end(), s.path.begin(), s.path.end());
    s.path.clear();
    s.path.shrink_to_fit();
  }
  return m;
}

}  // namespace

void EmpiricalMeasure::Append(const EmpiricalMeasure& other) {
  if (size() == 0 && data.empty()) {
    *this = other;
    return;
  }
  if (other.kind != kind || other.dim != dim || other.times != times) {
    throw InvalidArgument("cannot append an empirical measure on another grid");
  }
  data.insert(data.end(), other.data.begin(), other.data.end());
}

EmpiricalMeasure GlobalEmpirical(const TrajectorySet& ts) {
  if (ts.num_vertices == 0) throw InvalidArgument("empirical measure of an empty graph");
  EmpiricalMeasure m = EmptyLike(ts);
  m.data = ts.data;
  return m;
}

EmpiricalMeasure ComponentEmpirical(const TrajectorySet& ts, const RootedGraph& comp) {
  if (comp.origin.size() != static_cast<std::size_t>(comp.size()) || comp.size() == 0) {
    throw InvalidArgument("component lacks a vertex map");
  }
  EmpiricalMeasure m = EmptyLike(ts);
  for (int v : comp.origin) {
    if (v < 0 || v >= ts.num_vertices) {
      throw InvalidArgument("component vertex outside the trajectory set");
    }
    AppendPath(m, ts, v);
  }
  return m;
}

double TvDiscrete(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  CheckCompatible(a, b);
  if (a.kind != MarkKind::kDiscrete) throw InvalidArgument("tv_discrete needs discrete paths");
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> hist;
  auto key = [](std::span<const double> s) {
    std::string k(s.size() * sizeof(double), '\0');
    std::memcpy(k.data(), s.data(), k.size());
    return k;
  };
  for (std::int64_t i = 0; i < a.size(); ++i) ++hist[key(a.sample(i))].first;
  for (std::int64_t i = 0; i < b.size(); ++i) ++hist[key(b.sample(i))].second;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double tv = 0.0;
  for (const auto& [k, c] : hist) tv += std::abs(c.first / na - c.second / nb);
  return std::min(1.0, 0.5 * tv);
}

double Wasserstein1Paths(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                         double t, int max_samples, Seed seed) {
  CheckCompatible(a, b);
  if (max_samples < 1) throw InvalidArgument("wasserstein1: max_samples must be >= 1");
  const auto n = static_cast<int>(std::min<std::int64_t>({max_samples, a.size(), b.size()}));
  const auto ia = Subsample(a.size(), n, seed);
  const auto ib = Subsample(b.size(), n, seed);
  int steps = 0;
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  while (steps < a.length() && a.times[steps] <= t + slack) ++steps;
  if (steps == 0) throw InvalidArgument("wasserstein1: t precedes the time grid");
  CostMatrix cost(n);
  for (int i = 0; i < n; ++i) {
    const auto pa = a.path(ia[i]);
    for (int j = 0; j < n; ++j) {
      const auto pb = b.path(ib[j]);
      double sup = 0.0;
      for (int s = 0; s < steps; ++s) {
        const auto x = pa.at(s);
        const auto y = pb.at(s);
        double sq = 0.0;
        for (int c = 0; c < a.dim; ++c) sq += (x[c] - y[c]) * (x[c] - y[c]);
        sup = std::max(sup, sq);
      }
      cost(i, j) = std::sqrt(sup);
    }
  }
  return MinSumAssignment(cost).value / n;
}

EmpiricalMeasure RootLawMonteCarlo(const TreeSampler& trees, const InitSampler& init,
                                   const Model& model, const Horizon& horizon,
                                   std::int64_t replicas, Seed seed, int threads) {
  if (replicas < 1) throw InvalidArgument("root law needs >= 1 replica");
  std::vector<Slot> slots(static_cast<std::size_t>(replicas));
  ParallelFor(slots.size(), threads, [&](std::size_t r) {
    const RootedGraph tree = trees(DeriveSeed(seed, r, 0));
    const Marks marks = init(tree.graph, DeriveSeed(seed, r, 1));
    const TrajectorySet ts = Simulate(tree.graph, marks, model, horizon, DeriveSeed(seed, r, 2));
    Slot& s = slots[r];
    const auto p = ts.path(tree.root);
    s.path.assign(p.at(0).data(), p.at(0).data() + static_cast<std::size_t>(ts.length()) * ts.dim);
    s.kind = ts.kind;
    s.dim = ts.dim;
    if (r == 0) s.times = ts.times;
  });
  return MergeSlots(slots);
}

DepthSensitivity RootLawDepthSensitivity(
    const std::function<RootedGraph(int depth, Seed)>& trees, int depth,
    const InitSampler& init, const Model& model, const Horizon& horizon,
    std::int64_t replicas, Seed seed, int threads) {
  if (depth < 0) throw InvalidArgument("depth must be >= 0");
  DepthSensitivity out;
  out.depth = depth;
  out.base = RootLawMonteCarlo([&](Seed s) { return trees(depth, s); }, init, model,
                               horizon, replicas, DeriveSeed(seed, 0), threads);
  out.deeper = RootLawMonteCarlo([&](Seed s) { return trees(depth + 2, s); }, init,
                                 model, horizon, replicas, DeriveSeed(seed, 1), threads);
  out.w1_shift = Wasserstein1Paths(out.base, out.deeper, out.base.times.back(),
                                   kDefaultW1Samples, DeriveSeed(seed, 2));
  return out;
}

MeanStderr GiantFraction(const GraphSampler& graphs, std::int64_t replicas,
                         Seed seed, int threads) {
  if (replicas < 1) throw InvalidArgument("giant fraction needs >= 1 replica");
  std::vector<double> frac(static_cast<std::size_t>(replicas));
  ParallelFor(frac.size(), threads, [&](std::size_t r) {
    const Graph g = graphs(DeriveSeed(seed, r));
    if (g.num_vertices() == 0) throw InvalidArgument("giant fraction of an empty graph");
    const auto labels = ComponentLabels(g);
    std::vector<int> sizes(static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1);
    for (int l : labels) ++sizes[l];
    frac[r] = static_cast<double>(*std::max_element(sizes.begin(), sizes.end())) / g.num_vertices();
  });
  return {Mean(frac), StandardError(frac)};
}

PathFunctional FinalStateFunctional() {
  return [](PathView p) { return p.back()[0]; };
}

ComponentDraws ComponentFunctionalDistribution(
    const GraphSampler& graphs, const InitSampler& init, const Model& model,
    const PathFunctional& f, const Horizon& horizon, std::int64_t root_draws,
    Seed seed, int threads, int pool_largest) {
  if (root_draws < 100) throw InvalidArgument("component functional needs >= 100 root draws");
  ComponentDraws out;
  out.draws.resize(static_cast<std::size_t>(root_draws));
  const int pooled = static_cast<int>(std::min<std::int64_t>(pool_largest, root_draws));
  std::vector<EmpiricalMeasure> pools(static_cast<std::size_t>(std::max(pooled, 0)));

  auto simulate_component = [&](const Marks& marks, const RootedGraph& comp,
                                Seed noise) {
    std::vector<NoiseKey> keys(comp.origin.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      keys[i] = {noise, static_cast<std::uint64_t>(comp.origin[i])};
    }
    return Simulate(comp.graph, marks.Restrict(comp.origin), model, horizon, keys);
  };

  ParallelFor(out.draws.size(), threads, [&](std::size_t r) {
    const Graph g = graphs(DeriveSeed(seed, r, 0));
    const int n = g.num_vertices();
    if (n == 0) throw InvalidArgument("component draw on an empty graph");
    const Marks marks = init(g, DeriveSeed(seed, r, 1));
    CounterRng rng(DeriveSeed(seed, r, 2));
    const int root = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(n)));
    const Seed noise = DeriveSeed(seed, r, 3);

    const auto labels = ComponentLabels(g);
    std::vector<int> sizes(static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1);
    for (int l : labels) ++sizes[l];
    // First label of maximal size: the component with the smallest vertex.
    const int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

    const RootedGraph comp = ComponentOf(g, root);
    const TrajectorySet ts = simulate_component(marks, comp, noise);
    double sum = 0.0;
    for (int v = 0; v < ts.num_vertices; ++v) sum += f(ts.path(v));
    ComponentDraw& d = out.draws[r];
    d.value = sum / ts.num_vertices;
    d.in_largest = labels[root] == largest;
    d.component_size = comp.size();

    if (static_cast<int>(r) < pooled) {
      if (d.in_largest) {
        pools[r] = GlobalEmpirical(ts);
      } else {
        const RootedGraph big = LargestComponent(g);
        pools[r] = GlobalEmpirical(simulate_component(marks, big, noise));
      }
    }
  });
  for (auto& p : pools) {
    out.largest.Append(p);
    ++out.largest_graphs;
  }
  return out;
}

std::vector<double> TreeFunctionalSample(const TreeSampler& trees,
                                         const InitSampler& init,
                                         const Model& model,
                                         const PathFunctional& f,
                                         const Horizon& horizon,
                                         std::int64_t draws, Seed seed,
                                         int threads) {
  if (draws < 1) throw InvalidArgument("tree functional needs >= 1 draw");
  std::vector<double> values(static_cast<std::size_t>(draws));
  ParallelFor(values.size(), threads, [&](std::size_t r) {
    const RootedGraph tree = trees(DeriveSeed(seed, r, 0));
    const Marks marks = init(tree.graph, DeriveSeed(seed, r, 1));
    const TrajectorySet ts = Simulate(tree.graph, marks, model, horizon, DeriveSeed(seed, r, 2));
    double sum = 0.0;
    for (int v = 0; v < ts.num_vertices; ++v) sum += f(ts.path(v));
    values[r] = sum / ts.num_vertices;
  });
  return values;
}

LocalFunctional WindowMeanFunctional(int w) {
  if (w < 0) throw InvalidArgument("window radius must be >= 0");
  return [w](const TrajectorySet& ts, const LatticeBox& box, int site) {
    const std::vector<int> centre = box.Coords(site);
    const int d = box.dim();
    std::vector<int> offset(static_cast<std::size_t>(d), -w);
    std::vector<int> c(static_cast<std::size_t>(d));
    const int last = ts.length() - 1;
    double sum = 0.0;
    int count = 0;
    for (;;) {
      for (int i = 0; i < d; ++i) {
        c[i] = centre[i] + offset[i];
        if (std::abs(c[i]) > box.half_width()) throw SizeLimitError("window leaves the lattice box");
      }
      sum += ts.at(box.Index(c), last)[0];
      ++count;
      int i = d - 1;
      while (i >= 0 && offset[i] == w) offset[i--] = -w;
      if (i < 0) break;
      ++offset[i];
    }
    return sum / count;
  };
}

LocalFunctional AgreementFunctional(int w) {
  if (w < 1) throw InvalidArgument("agreement offset must be >= 1");
  return [w](const TrajectorySet& ts, const LatticeBox& box, int site) {
    std::vector<int> c = box.Coords(site);
    c[0] += w;
    if (c[0] > box.half_width()) throw SizeLimitError("window leaves the lattice box");
    const int last = ts.length() - 1;
    const auto a = ts.at(site, last);
    const auto b = ts.at(box.Index(c), last);
    return std::equal(a.begin(), a.end(), b.begin()) ? 1.0 : 0.0;
  };
}

std::vector<double> ShiftAverage(const TrajectorySet& ts, const LatticeBox& box,
                                 const LocalFunctional& f, int w,
                                 std::span<const int> box_sizes) {
  if (box.num_vertices() != ts.num_vertices) {
    throw InvalidArgument("trajectory set does not live on this lattice box");
  }
  if (w < 0) throw InvalidArgument("window radius must be >= 0");
  const int d = box.dim();
  std::vector<double> out;
  out.reserve(box_sizes.size());
  for (int m : box_sizes) {
    if (m < 1) throw InvalidArgument("box size must be >= 1");
    const int lo = -(m / 2);
    const int hi = m - m / 2 - 1;
    if (lo - w < -box.half_width() || hi + w > box.half_width()) {
      throw SizeLimitError("box B_" + std::to_string(m) + " with window " +
                           std::to_string(w) + " does not fit the lattice");
    }
    std::vector<int> c(static_cast<std::size_t>(d), lo);
    double sum = 0.0;
    std::int64_t count = 0;
    for (;;) {
      sum += f(ts, box, box.Index(c));
      ++count;
      int i = d - 1;
      while (i >= 0 && c[i] == hi) c[i--] = lo;
      if (i < 0) break;
      ++c[i];
    }
    out.push_back(sum / static_cast<double>(count));
  }
  return out;
}

std::vector<VariancePoint> ErgodicityVarianceCurve(
    const std::vector<std::vector<double>>& averages,
    std::span<const int> box_sizes) {
  if (averages.size() < 20) throw InvalidArgument("variance curve needs >= 20 replicas");
  std::vector<VariancePoint> out;
  for (std::size_t i = 0; i < box_sizes.size(); ++i) {
    std::vector<double> column;
    column.reserve(averages.size());
    for (const auto& row : averages) {
      if (row.size() != box_sizes.size()) {
        throw InvalidArgument("replica has the wrong number of box sizes");
      }
      column.push_back(row[i]);
    }
    out.push_back({box_sizes[i], SampleVariance(column)});
  }
  return out;
}

}  // namespace lwsim
