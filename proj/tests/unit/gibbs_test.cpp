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


#include "lwsim/gibbs.hpp"

#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "lwsim/errors.hpp"

namespace lwsim {
namespace {

Graph Triangle() {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {0, 2}};
  return Graph::FromEdges(3, e);
}

Graph Path4() {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}};
  return Graph::FromEdges(4, e);
}

TEST(GibbsSpecTest, ValidateRejectsBadSpecs) {
  GibbsSpec s = GibbsSpec::Ising(0.3);
  s.psi[1] = 2.0;  // asymmetric
  EXPECT_THROW(s.Validate(), InvalidArgument);
  GibbsSpec t = GibbsSpec::Ising(0.3);
  t.lambda = {0.3, 0.3};
  EXPECT_THROW(t.Validate(), InvalidArgument);
  GibbsSpec u = GibbsSpec::Ising(0.3);
  u.psi = {0.0, 0.0, 0.0, 1.0};
  EXPECT_THROW(u.Validate(), InvalidArgument);
}

TEST(GibbsSpecTest, JsonRoundTrip) {
  const GibbsSpec s = GibbsSpec::Ising(0.4, 0.7);
  const GibbsSpec t = GibbsSpec::FromJson(s.ToJson());
  EXPECT_EQ(t.alphabet, s.alphabet);
  for (std::size_t i = 0; i < s.psi.size(); ++i) EXPECT_DOUBLE_EQ(t.psi[i], s.psi[i]);
  for (std::size_t i = 0; i < s.lambda.size(); ++i) {
    EXPECT_DOUBLE_EQ(t.lambda[i], s.lambda[i]);
  }
  EXPECT_THROW(GibbsSpec::FromJson("{\"alphabet\":[0,1]}"), InvalidArgument);
}

TEST(ExactGibbsTest, IsingPartitionFunctions) {
  const double beta = 0.4;
  const GibbsSpec s = GibbsSpec::Ising(beta);
  const std::vector<Edge> one{{0, 1}};
  const ExactGibbs edge = ExactGibbsMeasure(Graph::FromEdges(2, one), s);
  EXPECT_NEAR(edge.partition_function, std::cosh(beta), 1e-14);
  const ExactGibbs path = ExactGibbsMeasure(Path4(), s);
  EXPECT_NEAR(path.partition_function, std::pow(std::cosh(beta), 3), 1e-14);
  const ExactGibbs tri = ExactGibbsMeasure(Triangle(), s);
  EXPECT_NEAR(tri.partition_function,
              (2 * std::exp(3 * beta) + 6 * std::exp(-beta)) / 8.0, 1e-14);
  // All-plus on the triangle.
  const std::vector<int> plus{1, 1, 1};
  EXPECT_NEAR(tri.probabilities[tri.Encode(plus)],
              std::exp(3 * beta) / (2 * std::exp(3 * beta) + 6 * std::exp(-beta)),
              1e-14);
  double total = 0.0;
  for (double p : tri.probabilities) total += p;
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(ExactGibbsTest, EncodeDecodeMixedRadix) {
  const GibbsSpec s = GibbsSpec::Independent({0, 1, 2}, {0.2, 0.3, 0.5});
  const ExactGibbs g = ExactGibbsMeasure(Path4(), s);
  EXPECT_EQ(g.Decode(1), (Configuration{1, 0, 0, 0}));
  EXPECT_EQ(g.Decode(3), (Configuration{0, 1, 0, 0}));
  for (std::int64_t i = 0; i < 81; ++i) EXPECT_EQ(g.Encode(g.Decode(i)), i);
  // Independent spec: product measure.
  const std::vector<int> x{2, 0, 1, 2};
  EXPECT_NEAR(g.probabilities[g.Encode(x)], 0.5 * 0.2 * 0.3 * 0.5, 1e-15);
  const auto m = g.Marginals();
  EXPECT_NEAR(m[3 * 2 + 2], 0.5, 1e-14);
}

TEST(KernelTest, BoundaryAndSingleSiteAgree) {
  const Graph g = Path4();
  const std::vector<int> region{1, 2};
  EXPECT_EQ(OuterBoundary(g, region), (std::vector<int>{0, 3}));
  const GibbsSpec s = GibbsSpec::Ising(0.7, 0.6);
  const std::vector<int> single{1};
  const std::map<int, int> boundary{{0, 1}, {2, 0}};
  const KernelDistribution k = ConditionalKernel(g, s, single, boundary);
  const Configuration config{1, 0, 0, 1};
  const auto site = SingleSiteKernel(g, s, config, 1);
  ASSERT_EQ(k.probabilities.size(), 2u);
  EXPECT_NEAR(k.probabilities[0], site[0], 1e-14);
  EXPECT_NEAR(k.probabilities[1], site[1], 1e-14);
  // Neighbours disagree, so the field cancels and only lambda remains.
  EXPECT_NEAR(site[1], 0.6, 1e-14);
  const std::map<int, int> wrong{{0, 1}};
  EXPECT_THROW(ConditionalKernel(g, s, single, wrong), InvalidArgument);
}

// The conditional law of x_A given everything else equals the kernel given
// only the outer boundary (Markov random field property).
TEST(KernelTest, MarkovPropertyAgainstExact) {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 4}, {0, 5}};
  const Graph g = Graph::FromEdges(6, e);
  const GibbsSpec s = GibbsSpec::Ising(0.55, 0.35);
  const ExactGibbs exact = ExactGibbsMeasure(g, s);
  const std::vector<int> region{1, 2};
  const auto boundary_vertices = OuterBoundary(g, region);
  for (std::int64_t idx = 0; idx < 64; ++idx) {
    const Configuration x = exact.Decode(idx);
    std::map<int, int> boundary;
    for (int b : boundary_vertices) boundary[b] = x[b];
    const KernelDistribution k = ConditionalKernel(g, s, region, boundary);
    double denom = 0.0;
    std::vector<double> num(4, 0.0);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        Configuration y = x;
        y[1] = a;
        y[2] = b;
        const double p = exact.probabilities[exact.Encode(y)];
        num[a + 2 * b] = p;
        denom += p;
      }
    }
    for (int i = 0; i < 4; ++i) {
      const Configuration local = k.Decode(i);
      EXPECT_NEAR(k.probabilities[i], num[local[0] + 2 * local[1]] / denom, 1e-13);
    }
  }
}

TEST(GlauberTest, DetailedBalanceOfSingleSiteUpdates) {
  const Graph g = Triangle();
  GibbsSpec s;
  s.alphabet = {0, 1, 2};
  s.psi = {2.0, 0.5, 1.0, 0.5, 1.5, 0.7, 1.0, 0.7, 3.0};
  s.lambda = {0.5, 0.3, 0.2};
  s.Validate();
  const ExactGibbs exact = ExactGibbsMeasure(g, s);
  for (std::int64_t i = 0; i < 27; ++i) {
    const Configuration x = exact.Decode(i);
    for (int v = 0; v < 3; ++v) {
      const auto kx = SingleSiteKernel(g, s, x, v);
      for (int a = 0; a < 3; ++a) {
        Configuration y = x;
        y[v] = a;
        const auto ky = SingleSiteKernel(g, s, y, v);
        const double flow_xy = exact.probabilities[i] * kx[a];
        const double flow_yx = exact.probabilities[exact.Encode(y)] * ky[x[v]];
        EXPECT_NEAR(flow_xy, flow_yx, 1e-15);
      }
    }
  }
}

TEST(GlauberTest, MarginalsConverge) {
  const Graph g = Triangle();
  const GibbsSpec s = GibbsSpec::Ising(0.3, 0.7);
  const auto exact = ExactGibbsMeasure(g, s).Marginals();
  std::vector<double> freq(3, 0.0);
  const std::int64_t sweeps = 40000;
  GlauberChain(g, s, 200, sweeps, 77, [&](const Configuration& c) {
    for (int v = 0; v < 3; ++v) freq[v] += c[v];
  });
  for (int v = 0; v < 3; ++v) {
    EXPECT_NEAR(freq[v] / sweeps, exact[2 * v + 1], 0.015) << v;
  }
  EXPECT_EQ(GlauberSample(g, s, 10, 5, 3), GlauberSample(g, s, 10, 5, 3));
}

TEST(IidTest, FrequenciesAndMarks) {
  const std::vector<double> lambda{0.25, 0.75};
  const Configuration c = IidSample(20000, lambda, 5);
  double ones = 0.0;
  for (int x : c) ones += x;
  EXPECT_NEAR(ones / 20000, 0.75, 0.015);
  const GibbsSpec s = GibbsSpec::Ising(0.1);
  const Marks m = ConfigurationMarks(s, Configuration{0, 1, 1});
  EXPECT_EQ(m.kind, MarkKind::kDiscrete);
  EXPECT_EQ(m.size(), 3);
}

}  // namespace
}  // namespace lwsim
