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


#include "lwsim/limit_trees.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lwsim/errors.hpp"
#include "lwsim/local_topology.hpp"

namespace lwsim {
namespace {

// Reference values computed independently by bisection on
// q = exp(c (q - 1)) and t e^-t = c e^-c.
constexpr double kSurvivalC2 = 0.7968121300200202;
constexpr double kSurvivalC15 = 0.5828116438658115;
constexpr double kExtinctionC2 = 0.20318786997997987;
constexpr double kPoissonDual2 = 0.40637573995995985;
constexpr double kPoissonDual15 = 0.6257825342012826;
constexpr double kPoissonDual3 = 0.17856062787792107;

TEST(DegreeDistTest, PoissonMoments) {
  const DegreeDist p = DegreeDist::Poisson(2.0);
  EXPECT_NEAR(p.Mean(), 2.0, 1e-10);
  EXPECT_NEAR(p.SecondMoment(), 6.0, 1e-9);
  EXPECT_NEAR(Theta(p), 2.0, 1e-9);
  EXPECT_NEAR(p.Pgf(0.5), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(p.PgfDerivative(1.0), 2.0, 1e-10);
  // Size-biasing a Poisson law leaves it unchanged.
  EXPECT_LT(DegreeTv(SizeBiased(p), p), 1e-10);
}

TEST(DegreeDistTest, ParseForms) {
  EXPECT_EQ(DegreeDist::Parse("delta:3").max_degree(), 3);
  EXPECT_EQ(DegreeDist::Parse("point:4")[4], 1.0);
  const DegreeDist w = DegreeDist::Parse("weights:0.2,0.2,0,0.6");
  EXPECT_DOUBLE_EQ(w[3], 0.6);
  EXPECT_NEAR(Theta(w), 1.8, 1e-12);
  EXPECT_NEAR(DegreeDist::Parse("poisson:1.5").Mean(), 1.5, 1e-10);
  EXPECT_THROW(DegreeDist::Parse("binomial:3"), InvalidArgument);
  EXPECT_THROW(DegreeDist::Parse("weights:-1,2"), InvalidArgument);
}

TEST(DegreeDistTest, SampleInvertsCdf) {
  const DegreeDist w = DegreeDist::Parse("weights:0.2,0.2,0,0.6");
  EXPECT_EQ(w.Sample(0.0), 0);
  EXPECT_EQ(w.Sample(0.19), 0);
  EXPECT_EQ(w.Sample(0.21), 1);
  EXPECT_EQ(w.Sample(0.41), 3);
  EXPECT_EQ(w.Sample(0.999), 3);
}

TEST(SurvivalTest, PoissonFixedPoints) {
  EXPECT_NEAR(SurvivalProb(DegreeDist::Poisson(2.0)), kSurvivalC2, 1e-9);
  EXPECT_NEAR(SurvivalProb(DegreeDist::Poisson(1.5)), kSurvivalC15, 1e-9);
  EXPECT_NEAR(ExtinctionFixedPoint(DegreeDist::Poisson(2.0)), kExtinctionC2, 1e-9);
  EXPECT_EQ(SurvivalProb(DegreeDist::Poisson(0.8)), 0.0);
  // delta_2 yields the bi-infinite path, which is always infinite.
  EXPECT_EQ(SurvivalProb(DegreeDist::PointMass(2)), 1.0);
  // Every vertex of a 3-regular tree has two children.
  EXPECT_NEAR(SurvivalProb(DegreeDist::PointMass(3)), 1.0, 1e-12);
}

TEST(DualityTest, PoissonDualMatchesClosedForm) {
  EXPECT_NEAR(PoissonDual(2.0), kPoissonDual2, 1e-12);
  EXPECT_NEAR(PoissonDual(1.5), kPoissonDual15, 1e-12);
  EXPECT_NEAR(PoissonDual(3.0), kPoissonDual3, 1e-12);
  for (double theta = 1.05; theta < 30.0; theta *= 1.3) {
    const double t = PoissonDual(theta);
    EXPECT_LT(t, 1.0);
    EXPECT_NEAR(t * std::exp(-t), theta * std::exp(-theta), 1e-15) << theta;
  }
  const DualityReport r = DualDistribution(DegreeDist::Poisson(2.0));
  EXPECT_NEAR(r.survival, kSurvivalC2, 1e-9);
  EXPECT_NEAR(r.dual_theta, kPoissonDual2, 1e-8);
  EXPECT_NEAR(r.dual_mass, 1.0, 1e-8);
  // The dual of Poisson(c) is Poisson(c q_hat).
  EXPECT_LT(DegreeTv(r.dual, DegreeDist::Poisson(kPoissonDual2)), 1e-8);
}

TEST(DualityTest, RootOfH) {
  const DegreeDist rho = DegreeDist::Parse("weights:0.2,0.2,0,0.6");
  const double alpha = DualAlpha(rho);
  EXPECT_GT(alpha, 0.0);
  EXPECT_LE(alpha, rho.Mean() / 2.0 + 1e-15);
  EXPECT_NEAR(DualityH(rho, alpha), 0.0, 1e-12);
  const DualityReport r = DualDistribution(rho);
  EXPECT_LT(r.dual_theta, 1.0);
  EXPECT_NEAR(r.dual_mass, 1.0, 1e-8);
}

TEST(GwTest, DeterministicAndRegular) {
  const TreeSample a = SampleGw(DegreeDist::Poisson(1.5), 8, 17);
  const TreeSample b = SampleGw(DegreeDist::Poisson(1.5), 8, 17);
  EXPECT_EQ(a.tree.graph, b.tree.graph);
  EXPECT_EQ(a.generation_sizes, b.generation_sizes);
  // UGW of a point mass is the regular tree.
  const TreeSample t = SampleUgw(DegreeDist::PointMass(3), 5, 1);
  EXPECT_TRUE(RootedIsomorphic(t.tree, GenRegularTree(3, 5)));
  EXPECT_EQ(t.generation_sizes, (std::vector<int>{1, 3, 6, 12, 24, 48}));
}

TEST(GwTest, ExtinctionFrequency) {
  const DegreeDist rho = DegreeDist::Poisson(2.0);
  const int n = 4000;
  int extinct = 0;
  for (int i = 0; i < n; ++i) {
    const TreeSample s = SampleGw(rho, 25, DeriveSeed(3, i), 5000);
    // Generations stop being recorded once the tree dies out.
    if (!s.truncated && static_cast<int>(s.generation_sizes.size()) <= 25) ++extinct;
  }
  const double freq = static_cast<double>(extinct) / n;
  EXPECT_NEAR(freq, kExtinctionC2, 4 * std::sqrt(0.2 * 0.8 / n));
}

TEST(GwTest, UgwRootDegreeLaw) {
  const DegreeDist rho = DegreeDist::Parse("weights:0.2,0.2,0,0.6");
  const int n = 20000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < n; ++i) {
    const TreeSample s = SampleUgw(rho, 1, DeriveSeed(8, i));
    ++counts[s.tree.graph.degree(s.tree.root)];
  }
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(counts[k] / static_cast<double>(n), rho[k], 0.015) << k;
  }
}

TEST(GwTest, SurvivingTreesReachDepth) {
  const DegreeDist rho = DegreeDist::Poisson(1.5);
  for (int i = 0; i < 200; ++i) {
    const TreeSample s = SampleUgwSurviving(rho, 4, DeriveSeed(9, i));
    ASSERT_EQ(s.generation_sizes.size(), 5u);
    EXPECT_GT(s.generation_sizes.back(), 0);
  }
  EXPECT_THROW(SampleUgwSurviving(DegreeDist::Poisson(0.5), 4, 1), InvalidArgument);
}

}  // namespace
}  // namespace lwsim
