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

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "lwsim/errors.hpp"
#include "lwsim/gibbs.hpp"

namespace lwsim {
namespace {

Graph PathGraph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::FromEdges(n, edges);
}

Graph Cycle(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph::FromEdges(n, edges);
}

TEST(HorizonTest, ContinuousStepCount) {
  EXPECT_EQ(Horizon::Continuous(1.0, 0.1).steps, 10);
  EXPECT_EQ(Horizon::Continuous(1.0, 0.3).steps, 4);
  EXPECT_EQ(Horizon::Continuous(1.0, 1e-3).steps, 1000);
  EXPECT_THROW(Horizon::Continuous(1.0, 0.0), InvalidArgument);
}

TEST(DiffusionTest, NoiselessTwoVertexMatchesRecursion) {
  const std::vector<Edge> e{{0, 1}};
  const Graph k2 = Graph::FromEdges(2, e);
  const DiffusionModel m = ConsensusSdeModel(0.0);
  const Marks x0 = Marks::Vector(1, {1.0, 0.0});
  const double dt = 0.01;
  const TrajectorySet ts = SimulateDiffusion(k2, x0, m, 1.0, dt, 3);
  ASSERT_EQ(ts.length(), 101);
  EXPECT_DOUBLE_EQ(ts.times.back(), 1.0);
  for (int k = 0; k < ts.length(); ++k) {
    // The difference contracts by exactly (1 - 2 dt) per step; the mean is
    // conserved.
    const double diff = std::pow(1.0 - 2.0 * dt, k);
    EXPECT_NEAR(ts.at(0, k)[0] - ts.at(1, k)[0], diff, 1e-12);
    EXPECT_NEAR(ts.at(0, k)[0] + ts.at(1, k)[0], 1.0, 1e-12);
  }
  // Closed form of the ODE: 1/2 + e^{-2t}/2; first-order error in dt.
  const double exact = 0.5 + 0.5 * std::exp(-2.0);
  EXPECT_NEAR(ts.at(0, 100)[0], exact, 2 * dt);
}

TEST(DiffusionTest, LinearCovarianceMatchesExactRecursion) {
  // On K2 with x0 = 0: d = x0 - x1 follows d' = (1 - 2dt) d + sigma
  // sqrt(dt)(z0 - z1), s = x0 + x1 a random walk; both are Gaussian.
  const std::vector<Edge> e{{0, 1}};
  const Graph k2 = Graph::FromEdges(2, e);
  const double sigma = 0.8, dt = 0.05, t_end = 1.0;
  const DiffusionModel m = ConsensusSdeModel(sigma);
  const Marks x0 = Marks::Vector(1, {0.0, 0.0});
  const int steps = 20;
  double var_d = 0.0;
  for (int j = 0; j < steps; ++j) {
    var_d += 2.0 * sigma * sigma * dt * std::pow(1.0 - 2.0 * dt, 2 * j);
  }
  const double var_s = 2.0 * sigma * sigma * t_end;
  const double var_x = (var_s + var_d) / 4.0;
  const double cov_x = (var_s - var_d) / 4.0;
  const int n = 20000;
  double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
  for (int r = 0; r < n; ++r) {
    const TrajectorySet ts = SimulateDiffusion(k2, x0, m, t_end, dt, DeriveSeed(1, r));
    const double a = ts.at(0, steps)[0], b = ts.at(1, steps)[0];
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  const double mx = sx / n, my = sy / n;
  // Relative SE of a Gaussian variance estimate is sqrt(2/n) ~ 1%.
  EXPECT_NEAR(sxx / n - mx * mx, var_x, 0.05 * var_x);
  EXPECT_NEAR(sxy / n - mx * my, cov_x, 0.05 * var_x);
}

TEST(DiffusionTest, NonFiniteStateReportsStep) {
  DiffusionModel m;
  m.name = "explode";
  m.dim = 1;
  m.drift = [](double, std::span<const double> own, const NeighborBundle&,
               std::span<double> b) { b[0] = own[0] * own[0]; };
  m.sigma = [](double, std::span<const double>, const NeighborBundle&,
               std::span<double> s) { s[0] = 0.0; };
  const std::vector<Edge> e{{0, 1}};
  const Graph g = Graph::FromEdges(2, e);
  try {
    SimulateDiffusion(g, Marks::Vector(1, {1e200, 0.0}), m, 1.0, 0.5, 1);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& err) {
    EXPECT_EQ(err.step(), 1);
  }
}

TEST(DiscreteTest, VoterPreservesConsensus) {
  const Graph g = Cycle(12);
  const TrajectorySet ts = SimulateDiscrete(
      g, Marks::Discrete(std::vector<int>(12, 1)), VoterModel(), 10, 4);
  for (int v = 0; v < 12; ++v) {
    for (int k = 0; k <= 10; ++k) EXPECT_EQ(ts.at(v, k)[0], 1.0);
  }
}

TEST(DiscreteTest, NoiselessMajorityOnPath) {
  // With epsilon = 0 the update is deterministic: 0 1 1 0 0 -> ...
  const Graph g = PathGraph(5);
  const Marks x0 = Marks::Discrete({0, 1, 1, 0, 0});
  const TrajectorySet ts = SimulateDiscrete(g, x0, NoisyMajorityModel(0.0), 1, 9);
  // v0 sees {1}; v1 sees {0,1} tie; v2 sees {1,0} tie; v3 sees {1,0} tie;
  // v4 sees {0}.
  const std::vector<double> expected{1, 1, 1, 0, 0};
  for (int v = 0; v < 5; ++v) EXPECT_EQ(ts.at(v, 1)[0], expected[v]) << v;
}

TEST(DiscreteTest, IsolatedVertexHolds) {
  const Graph g = Graph::FromEdges(3, std::vector<Edge>{{0, 1}});
  const TrajectorySet ts =
      SimulateDiscrete(g, Marks::Discrete({0, 1, 1}), VoterModel(), 5, 2);
  for (int k = 0; k <= 5; ++k) EXPECT_EQ(ts.at(2, k)[0], 1.0);
}

// Changing the initial state at one vertex only affects vertices within
// distance k after k steps, noise held fixed.
TEST(LocalityTest, PerturbationSpreadsOneHopPerStep) {
  const Graph g = PathGraph(30);
  std::vector<int> init(30);
  for (int v = 0; v < 30; ++v) init[v] = (v * 7) % 3 == 0;
  std::vector<int> flipped = init;
  flipped[0] = 1 - flipped[0];
  for (const char* name : {"voter", "noisy_majority"}) {
    const Model m = BuiltinModel(name, name[0] == 'n' ? ModelParams{{"epsilon", 0.1}}
                                                       : ModelParams{});
    const Horizon h = Horizon::Discrete(8);
    const TrajectorySet a = Simulate(g, Marks::Discrete(init), m, h, 5);
    const TrajectorySet b = Simulate(g, Marks::Discrete(flipped), m, h, 5);
    for (int k = 0; k <= 8; ++k) {
      for (int v = k + 1; v < 30; ++v) {
        ASSERT_EQ(a.at(v, k)[0], b.at(v, k)[0]) << name << " v=" << v << " k=" << k;
      }
    }
  }
}

TEST(LocalityTest, DiffusionIsLocalPerStep) {
  const Graph g = PathGraph(20);
  const Model m = ConsensusSdeModel(0.5);
  std::vector<double> x0(20, 0.0), x1(20, 0.0);
  x1[0] = 3.0;
  const Horizon h = Horizon::Continuous(0.1, 0.01);
  const TrajectorySet a = Simulate(g, Marks::Vector(1, x0), m, h, 8);
  const TrajectorySet b = Simulate(g, Marks::Vector(1, x1), m, h, 8);
  for (int k = 0; k < a.length(); ++k) {
    for (int v = k + 1; v < 20; ++v) ASSERT_EQ(a.at(v, k)[0], b.at(v, k)[0]);
  }
}

// Relabelling the graph and carrying marks and noise keys along relabels
// the trajectories, bit for bit.
TEST(EquivarianceTest, RelabellingCommutesWithSimulation) {
  const Graph g = GenErdosRenyi(40, 0.08, 3);
  std::vector<int> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng rng(4);
  rng.Shuffle(std::span<int>(perm));
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edges()) edges.emplace_back(perm[u], perm[v]);
  const Graph h = Graph::FromEdges(40, edges);
  const auto keys = DefaultNoiseKeys(40, 11);
  std::vector<NoiseKey> hkeys(40);
  for (int v = 0; v < 40; ++v) hkeys[perm[v]] = keys[v];
  const std::vector<double> lambda{0.5, 0.5};
  const Configuration c = IidSample(40, lambda, 12);
  std::vector<int> hc(40);
  std::vector<double> gr(40), hr(40);
  for (int v = 0; v < 40; ++v) {
    hc[perm[v]] = c[v];
    gr[v] = 0.1 * v;
    hr[perm[v]] = 0.1 * v;
  }
  struct Case {
    Model model;
    Horizon horizon;
    Marks gm, hm;
  };
  const std::vector<Case> cases{
      {VoterModel(), Horizon::Discrete(6), Marks::Discrete(c), Marks::Discrete(hc)},
      {NoisyMajorityModel(0.2), Horizon::Discrete(6), Marks::Discrete(c),
       Marks::Discrete(hc)},
      {ConsensusSdeModel(0.7), Horizon::Continuous(0.5, 0.05), Marks::Vector(1, gr),
       Marks::Vector(1, hr)},
      {KuramotoModel(1.5, 0.3), Horizon::Continuous(0.5, 0.05), Marks::Vector(1, gr),
       Marks::Vector(1, hr)},
  };
  for (const auto& cs : cases) {
    const TrajectorySet a = Simulate(g, cs.gm, cs.model, cs.horizon, keys);
    const TrajectorySet b = Simulate(h, cs.hm, cs.model, cs.horizon, hkeys);
    for (int v = 0; v < 40; ++v) {
      for (int k = 0; k < a.length(); ++k) {
        ASSERT_EQ(a.at(v, k)[0], b.at(perm[v], k)[0]);
      }
    }
  }
}

TEST(CouplingTest, StreamsSplitByDistance) {
  const Graph g = PathGraph(30);
  const std::vector<int> a1{2}, a2{25};
  const Marks x0 = Marks::Discrete(std::vector<int>(30, 0));
  const Model m = NoisyMajorityModel(0.3);
  const Horizon h = Horizon::Discrete(5);
  const CoupledTriple t = CoupledSimulation(g, x0, a1, a2, m, h, 77);
  for (int v = 0; v < 30; ++v) {
    EXPECT_EQ(t.near_second[v], std::abs(v - 2) >= std::abs(v - 25) ? 1 : 0);
  }
  EXPECT_EQ(t.x, Simulate(g, x0, m, h, DeriveSeed(77, 0)));
  // Regions further apart than twice the horizon: Y agrees with X near A1,
  // Z agrees with X near A2, and Y, Z differ from X elsewhere.
  for (int k = 0; k <= 5; ++k) {
    EXPECT_EQ(t.y.at(2, k)[0], t.x.at(2, k)[0]);
    EXPECT_EQ(t.z.at(25, k)[0], t.x.at(25, k)[0]);
  }
  EXPECT_NE(t.y, t.x);
  EXPECT_NE(t.z, t.x);
}

TEST(CovarianceTest, ThreadCountDoesNotChangeResult) {
  const Graph g = PathGraph(15);
  const std::vector<RegionPair> pairs{{{0}, {2}, 2}, {{0}, {6}, 6}};
  const Model m = NoisyMajorityModel(0.1);
  const auto f = FinalMeanFunctional();
  const auto a = CovarianceDecayProfile(g, IidBernoulliInit(0.5), m, pairs, f,
                                        Horizon::Discrete(2), 400, 3, kDefaultCiZ, 1);
  const auto b = CovarianceDecayProfile(g, IidBernoulliInit(0.5), m, pairs, f,
                                        Horizon::Discrete(2), 400, 3, kDefaultCiZ, 3);
  ASSERT_EQ(a.points.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(a.points[i].covariance, b.points[i].covariance);
    EXPECT_EQ(a.points[i].ci_half_width, b.points[i].ci_half_width);
  }
  // Beyond twice the horizon the regions are independent.
  EXPECT_LE(std::abs(a.points[1].covariance), a.points[1].ci_half_width);
  EXPECT_THROW(CovarianceDecayProfile(g, IidBernoulliInit(0.5), m, pairs, f,
                                      Horizon::Discrete(2), 50, 3),
               InvalidArgument);
}

TEST(ModelTest, BuiltinNamesAndInit) {
  EXPECT_TRUE(std::holds_alternative<DiscreteModel>(BuiltinModel("voter")));
  EXPECT_TRUE(std::holds_alternative<DiffusionModel>(
      BuiltinModel("kuramoto", {{"K", 1.0}, {"sigma", 0.1}})));
  EXPECT_THROW(BuiltinModel("ising"), InvalidArgument);
  const Graph g = PathGraph(5);
  const Marks m = IidGaussianInit(2, 0.0, 10.0, 1.0)(g, 3);
  EXPECT_EQ(m.size(), 5);
  for (double x : m.values) EXPECT_LE(std::abs(x), 1.0);
  EXPECT_THROW(IidBernoulliInit(1.5), InvalidArgument);
}

}  // namespace
}  // namespace lwsim
