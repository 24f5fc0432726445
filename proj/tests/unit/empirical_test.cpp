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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lwsim/errors.hpp"
#include "lwsim/limit_trees.hpp"
#include "lwsim/stats.hpp"

namespace lwsim {
namespace {

EmpiricalMeasure Scalar(MarkKind kind, std::vector<double> times,
                        std::vector<double> data) {
  EmpiricalMeasure m;
  m.kind = kind;
  m.dim = 1;
  m.times = std::move(times);
  m.data = std::move(data);
  return m;
}

TEST(DistanceTest, TvOfPathHistograms) {
  const auto a = Scalar(MarkKind::kDiscrete, {0}, {0, 0, 1, 1});
  const auto b = Scalar(MarkKind::kDiscrete, {0}, {0, 1, 1, 1});
  EXPECT_DOUBLE_EQ(TvDiscrete(a, b), 0.25);
  EXPECT_DOUBLE_EQ(TvDiscrete(a, a), 0.0);
  // Paths differing only at the second step are different atoms.
  const auto c = Scalar(MarkKind::kDiscrete, {0, 1}, {0, 0, 0, 1});
  const auto d = Scalar(MarkKind::kDiscrete, {0, 1}, {0, 1, 0, 0});
  EXPECT_DOUBLE_EQ(TvDiscrete(c, d), 0.0);
  const auto e = Scalar(MarkKind::kDiscrete, {0, 1}, {0, 1, 0, 1});
  EXPECT_DOUBLE_EQ(TvDiscrete(c, e), 0.5);
}

TEST(DistanceTest, W1HandExample) {
  const auto a = Scalar(MarkKind::kVector, {0}, {0.0, 1.0});
  const auto b = Scalar(MarkKind::kVector, {0}, {3.0, 0.5});
  // Matching 0-0.5 and 1-3 costs 2.5; the other matching costs 3.5.
  EXPECT_NEAR(Wasserstein1Paths(a, b, 0.0), 1.25, 1e-14);
  // Sup over the grid up to t only.
  const auto c = Scalar(MarkKind::kVector, {0, 1}, {0.0, 5.0, 1.0, 1.0});
  const auto d = Scalar(MarkKind::kVector, {0, 1}, {0.0, 0.0, 1.0, 1.0});
  EXPECT_NEAR(Wasserstein1Paths(c, d, 0.5), 0.0, 1e-14);
  EXPECT_NEAR(Wasserstein1Paths(c, d, 1.0), 2.5, 1e-14);
}

TEST(DistanceTest, W1IsAMetricOnSmallMeasures) {
  CounterRng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<EmpiricalMeasure> ms;
    for (int j = 0; j < 3; ++j) {
      std::vector<double> data(2 * 8);
      for (double& x : data) x = rng.Normal();
      ms.push_back(Scalar(MarkKind::kVector, {0, 0.5}, data));
    }
    const double ab = Wasserstein1Paths(ms[0], ms[1], 1.0);
    const double bc = Wasserstein1Paths(ms[1], ms[2], 1.0);
    const double ac = Wasserstein1Paths(ms[0], ms[2], 1.0);
    EXPECT_LE(ac, ab + bc + 1e-12);
    EXPECT_NEAR(ab, Wasserstein1Paths(ms[1], ms[0], 1.0), 1e-12);
    EXPECT_NEAR(Wasserstein1Paths(ms[0], ms[0], 1.0), 0.0, 1e-15);
  }
}

// Weighting each component measure by |C| / n recovers the global measure.
TEST(ComponentTest, ComponentMeasuresPoolToGlobal) {
  const Graph g = GenErdosRenyi(300, 1.2 / 300, 4);
  const Model m = VoterModel();
  const Marks x0 = IidBernoulliInit(0.5)(g, 5);
  const TrajectorySet ts = Simulate(g, x0, m, Horizon::Discrete(3), 6);
  const auto labels = ComponentLabels(g);
  EmpiricalMeasure pooled;
  bool first = true;
  std::vector<char> seen(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (seen[labels[v]]) continue;
    seen[labels[v]] = 1;
    const EmpiricalMeasure c = ComponentEmpirical(ts, ComponentOf(g, v));
    if (first) {
      pooled = c;
      first = false;
    } else {
      pooled.Append(c);
    }
  }
  const EmpiricalMeasure global = GlobalEmpirical(ts);
  EXPECT_EQ(pooled.size(), global.size());
  EXPECT_DOUBLE_EQ(TvDiscrete(pooled, global), 0.0);
}

TEST(RootLawTest, DeterministicAcrossThreadsAndMatchesInit) {
  const DegreeDist rho = DegreeDist::Poisson(1.5);
  const TreeSampler trees = [&](Seed s) { return SampleUgw(rho, 3, s).tree; };
  const Model m = VoterModel();
  const auto a = RootLawMonteCarlo(trees, IidBernoulliInit(0.3), m,
                                   Horizon::Discrete(2), 3000, 9, 1);
  const auto b = RootLawMonteCarlo(trees, IidBernoulliInit(0.3), m,
                                   Horizon::Discrete(2), 3000, 9, 3);
  EXPECT_EQ(a.data, b.data);
  // The voter model keeps the one-site marginal of an i.i.d. start.
  double ones = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) ones += a.path(i).back()[0];
  EXPECT_NEAR(ones / a.size(), 0.3, 4 * std::sqrt(0.21 / 3000));
}

TEST(GiantTest, ErdosRenyiFraction) {
  const GraphSampler graphs = [](Seed s) { return GenErdosRenyi(5000, 2.0 / 5000, s); };
  const MeanStderr g = GiantFraction(graphs, 10, 3, 2);
  // Survival probability of Poisson(2) Galton-Watson trees.
  EXPECT_NEAR(g.mean, 0.7968121300200202, 0.02);
  EXPECT_GT(g.std_error, 0.0);
}

TEST(ComponentTest, FunctionalDrawsAreThreadInvariant) {
  const GraphSampler graphs = [](Seed s) { return GenErdosRenyi(400, 2.0 / 400, s); };
  const auto run = [&](int threads) {
    return ComponentFunctionalDistribution(graphs, IidBernoulliInit(0.5), VoterModel(),
                                           FinalStateFunctional(),
                                           Horizon::Discrete(2), 120, 4, threads, 3);
  };
  const ComponentDraws a = run(1);
  const ComponentDraws b = run(4);
  ASSERT_EQ(a.draws.size(), 120u);
  for (std::size_t i = 0; i < a.draws.size(); ++i) {
    EXPECT_EQ(a.draws[i].value, b.draws[i].value);
    EXPECT_EQ(a.draws[i].in_largest, b.draws[i].in_largest);
    EXPECT_GE(a.draws[i].value, 0.0);
    EXPECT_LE(a.draws[i].value, 1.0);
  }
  EXPECT_EQ(a.largest.data, b.largest.data);
  EXPECT_EQ(a.largest_graphs, 3);
}

TrajectorySet IidField(const LatticeBox& box, Seed seed) {
  TrajectorySet ts;
  ts.kind = MarkKind::kDiscrete;
  ts.dim = 1;
  ts.num_vertices = static_cast<int>(box.num_vertices());
  ts.times = {0.0};
  const std::vector<double> lambda{0.5, 0.5};
  CounterRng rng(seed);
  ts.data.resize(static_cast<std::size_t>(ts.num_vertices));
  for (double& x : ts.data) x = rng.Bernoulli(0.5) ? 1.0 : 0.0;
  return ts;
}

// For an i.i.d. fair-coin field the shift average of a single site, or of
// the agreement indicator, has variance 1 / (4 m^d).
TEST(ShiftAverageTest, BinomialVariance) {
  const LatticeBox box(2, 6);
  const std::vector<int> sizes{2, 4, 8};
  std::vector<std::vector<double>> single, agree;
  for (int r = 0; r < 3000; ++r) {
    const TrajectorySet ts = IidField(box, DeriveSeed(12, r));
    single.push_back(ShiftAverage(ts, box, WindowMeanFunctional(0), 0, sizes));
    agree.push_back(ShiftAverage(ts, box, AgreementFunctional(2), 2, sizes));
  }
  const auto vs = ErgodicityVarianceCurve(single, sizes);
  const auto va = ErgodicityVarianceCurve(agree, sizes);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double expected = 1.0 / (4.0 * sizes[i] * sizes[i]);
    EXPECT_EQ(vs[i].box_size, sizes[i]);
    EXPECT_NEAR(vs[i].variance, expected, 0.15 * expected) << sizes[i];
    EXPECT_NEAR(va[i].variance, expected, 0.15 * expected) << sizes[i];
  }
}

TEST(ShiftAverageTest, SmallBoxesAndLimits) {
  const LatticeBox box(1, 3);
  TrajectorySet ts;
  ts.num_vertices = 7;
  ts.times = {0.0};
  ts.data = {0, 1, 2, 3, 4, 5, 6};  // value = coordinate + 3
  const std::vector<int> sizes{1, 2, 3};
  const auto avg = ShiftAverage(ts, box, WindowMeanFunctional(0), 0, sizes);
  // B_1 = {0}, B_2 = {-1, 0}, B_3 = {-1, 0, 1}.
  EXPECT_DOUBLE_EQ(avg[0], 3.0);
  EXPECT_DOUBLE_EQ(avg[1], 2.5);
  EXPECT_DOUBLE_EQ(avg[2], 3.0);
  const std::vector<int> too_big{7};
  EXPECT_THROW(ShiftAverage(ts, box, WindowMeanFunctional(1), 1, too_big),
               SizeLimitError);
  const std::vector<std::vector<double>> few(5, std::vector<double>{1.0});
  const std::vector<int> one{1};
  EXPECT_THROW(ErgodicityVarianceCurve(few, one), InvalidArgument);
}

}  // namespace
}  // namespace lwsim
