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


#include "lwsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "lwsim/errors.hpp"

namespace lwsim {
namespace {

Graph Path(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::FromEdges(n, edges);
}

TEST(GraphTest, FromEdgesBuildsSortedAdjacency) {
  const std::vector<Edge> edges{{2, 0}, {0, 1}, {3, 2}};
  const Graph g = Graph::FromEdges(4, edges);
  EXPECT_EQ(g.num_vertices(), 4);
  EXPECT_EQ(g.num_edges(), 3);
  EXPECT_EQ(std::vector<int>(g.neighbors(0).begin(), g.neighbors(0).end()),
            (std::vector<int>{1, 2}));
  EXPECT_TRUE(g.has_edge(2, 3));
  EXPECT_TRUE(g.has_edge(3, 2));
  EXPECT_FALSE(g.has_edge(1, 3));
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {0, 2}, {2, 3}}));
  EXPECT_EQ(g.degrees(), (std::vector<int>{2, 1, 2, 1}));
  ValidateGraph(g);
}

TEST(GraphTest, RejectsMalformedEdges) {
  const std::vector<Edge> loop{{1, 1}};
  const std::vector<Edge> dup{{0, 1}, {1, 0}};
  const std::vector<Edge> range{{0, 5}};
  EXPECT_THROW(Graph::FromEdges(3, loop), InvalidArgument);
  EXPECT_THROW(Graph::FromEdges(3, dup), InvalidArgument);
  EXPECT_THROW(Graph::FromEdges(3, range), InvalidArgument);
}

TEST(GraphTest, ErdosRenyiDeterministicAndMeanDegree) {
  const Graph a = GenErdosRenyi(4000, 3.0 / 4000, 11);
  const Graph b = GenErdosRenyi(4000, 3.0 / 4000, 11);
  EXPECT_EQ(a, b);
  ValidateGraph(a);
  const double mean = 2.0 * static_cast<double>(a.num_edges()) / 4000;
  // Edge count is Binomial(n(n-1)/2, p); its sd in mean-degree units is ~0.04.
  EXPECT_NEAR(mean, 3.0, 0.2);
  EXPECT_EQ(GenErdosRenyi(100, 0.0, 1).num_edges(), 0);
  EXPECT_EQ(GenErdosRenyi(10, 1.0, 1).num_edges(), 45);
}

TEST(GraphTest, GnmHasExactEdgeCount) {
  const Graph g = GenGnm(500, 777, 3);
  EXPECT_EQ(g.num_edges(), 777);
  ValidateGraph(g);
  EXPECT_THROW(GenGnm(4, 7, 3), InvalidArgument);
}

TEST(GraphTest, ConfigurationModelMatchesDegrees) {
  std::vector<int> degrees(1000, 3);
  degrees[0] = 1;
  degrees[1] = 1;
  const auto result = GenConfigurationModel(degrees, 5);
  ValidateGraph(result.graph);
  if (!result.erased) EXPECT_EQ(result.graph.degrees(), degrees);
  const auto reg = GenRandomRegular(200, 4, 6);
  ValidateGraph(reg.graph);
  EXPECT_FALSE(reg.erased);
  for (int d : reg.graph.degrees()) EXPECT_EQ(d, 4);
}

TEST(GraphTest, GrowthBound) {
  std::vector<int> degrees(10000, 3);
  // 10000^(1/4 - 0.05) ~ 6.3.
  EXPECT_TRUE(DegreesBelowGrowthBound(degrees, 0.05));
  degrees[5] = 7;
  EXPECT_FALSE(DegreesBelowGrowthBound(degrees, 0.05));
}

TEST(LatticeTest, BoxSizesAndIndexing) {
  const RootedGraph rg = GenLatticeBox(2, 3);
  const LatticeBox box(2, 3);
  EXPECT_EQ(rg.size(), 49);
  EXPECT_EQ(box.num_vertices(), 49);
  // 2 * side * (side - 1) nearest-neighbour edges in 2D.
  EXPECT_EQ(rg.graph.num_edges(), 2 * 7 * 6);
  const std::vector<int> origin{0, 0};
  EXPECT_EQ(rg.root, box.Index(origin));
  for (int i = 0; i < rg.size(); ++i) EXPECT_EQ(box.Index(box.Coords(i)), i);
  const std::vector<int> corner{-3, -3};
  EXPECT_EQ(box.Index(corner), 0);
  const std::vector<int> next{-3, -2};
  EXPECT_EQ(box.Index(next), 1);
  EXPECT_EQ(rg.graph.degree(rg.root), 4);
  EXPECT_EQ(rg.graph.degree(0), 2);
}

TEST(LatticeTest, ThreeDimensionalCount) {
  const RootedGraph rg = GenLatticeBox(3, 2);
  EXPECT_EQ(rg.size(), 125);
  EXPECT_EQ(rg.graph.num_edges(), 3 * 25 * 4);
  EXPECT_THROW(GenLatticeBox(3, 100, 1000), SizeLimitError);
}

class RegularTreeSizeTest
    : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(RegularTreeSizeTest, MatchesClosedForm) {
  const auto [d, height] = GetParam();
  const RootedGraph t = GenRegularTree(d, height);
  // 1 + d((d-1)^n - 1)/(d-2).
  const std::int64_t expected =
      1 + d * (static_cast<std::int64_t>(std::llround(std::pow(d - 1, height))) - 1) /
              (d - 2);
  EXPECT_EQ(t.size(), expected);
  EXPECT_EQ(RegularTreeSize(d, height), expected);
  EXPECT_EQ(t.graph.num_edges(), expected - 1);
  EXPECT_EQ(t.graph.degree(t.root), d);
  const auto dist = BfsDistances(t.graph, std::vector<int>{t.root});
  for (int v = 0; v < t.size(); ++v) {
    EXPECT_EQ(t.graph.degree(v), dist[v] == height ? 1 : d);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, RegularTreeSizeTest,
                         ::testing::Values(std::pair{3, 1}, std::pair{3, 5},
                                           std::pair{4, 4}, std::pair{5, 3},
                                           std::pair{3, 10}));

TEST(CanopyTest, SingleBaseIsOneTree) {
  const CanopyTruncation ct = GenCanopyTruncation(3, 4, 1);
  // Level widths 16, 8, 4, 2, 1.
  EXPECT_EQ(ct.rooted.size(), 31);
  EXPECT_EQ(ct.rooted.graph.num_edges(), 30);
  EXPECT_EQ(ct.LevelWidth(0), 16);
  EXPECT_EQ(ct.LevelWidth(4), 1);
  const int root = ct.rooted.root;
  EXPECT_EQ(ct.Coordinates(ct.rooted.origin[root]),
            (std::pair<int, std::int64_t>{0, 0}));
  // Leaves of the canopy have degree 1, interior level vertices degree d.
  EXPECT_EQ(ct.rooted.graph.degree(root), 1);
  for (int v = 0; v < ct.rooted.size(); ++v) {
    const auto [level, j] = ct.Coordinates(ct.rooted.origin[v]);
    const int expected = level == 0 ? 1 : (level == 4 ? 2 : 3);
    EXPECT_EQ(ct.rooted.graph.degree(v), expected) << level << "," << j;
  }
}

TEST(CanopyTest, RootLevelComponent) {
  const CanopyTruncation ct = GenCanopyTruncation(4, 3, 2, 1);
  // Component of (1, 0): a single base vertex with its whole subtree.
  EXPECT_EQ(ct.rooted.size(), 1 + 3 + 9 + 27);
  for (int v = 0; v < ct.rooted.size(); ++v) {
    EXPECT_EQ(ct.CanopyIndex(ct.Coordinates(ct.rooted.origin[v]).first,
                             ct.Coordinates(ct.rooted.origin[v]).second),
              ct.rooted.origin[v]);
  }
}

TEST(ComponentTest, LabelsLargestAndBalls) {
  const std::vector<Edge> edges{{0, 1}, {2, 3}, {3, 4}, {4, 5}, {6, 7}};
  const Graph g = Graph::FromEdges(9, edges);
  EXPECT_EQ(ComponentLabels(g), (std::vector<int>{0, 0, 1, 1, 1, 1, 2, 2, 3}));
  const RootedGraph big = LargestComponent(g);
  EXPECT_EQ(big.size(), 4);
  EXPECT_EQ(big.origin[big.root], 2);
  const RootedGraph comp = ComponentOf(g, 4);
  EXPECT_EQ(comp.size(), 4);
  EXPECT_EQ(comp.origin[comp.root], 4);
  const RootedGraph ball = Ball(g, 3, 1);
  EXPECT_EQ(ball.size(), 3);
  EXPECT_EQ(ball.origin[ball.root], 3);
  const RootedGraph nested = Ball(comp, 1);
  std::vector<int> orig = nested.origin;
  std::sort(orig.begin(), orig.end());
  EXPECT_EQ(orig, (std::vector<int>{3, 4, 5}));
  EXPECT_EQ(ComponentOf(g, 8).size(), 1);
}

TEST(ComponentTest, BallIsInducedOnPath) {
  const Graph g = Path(10);
  const auto verts = BallVertices(g, 5, 2);
  EXPECT_EQ(verts.front(), 5);
  EXPECT_EQ(verts.size(), 5u);
  const auto dist = BfsDistances(g, std::vector<int>{0}, 3);
  EXPECT_EQ(dist[3], 3);
  EXPECT_EQ(dist[4], -1);
}

TEST(EdgeListTest, RoundTrip) {
  const Graph g = GenErdosRenyi(60, 0.08, 4);
  std::stringstream ss;
  WriteEdgeList(ss, g, 7);
  const ParsedEdgeList parsed = ReadEdgeList(ss);
  EXPECT_EQ(parsed.graph, g);
  ASSERT_TRUE(parsed.root.has_value());
  EXPECT_EQ(*parsed.root, 7);
  std::istringstream none(EdgeListString(Path(3)));
  const ParsedEdgeList p2 = ReadEdgeList(none);
  EXPECT_FALSE(p2.root.has_value());
  EXPECT_EQ(p2.graph, Path(3));
}

TEST(EdgeListTest, RejectsBadInput) {
  std::istringstream bad_header("vertices 3\n");
  EXPECT_THROW(ReadEdgeList(bad_header), InvalidArgument);
  std::istringstream bad_row("n 3 root none\n0 x\n");
  EXPECT_THROW(ReadEdgeList(bad_row), InvalidArgument);
  std::istringstream bad_root("n 3 root 3\n");
  EXPECT_THROW(ReadEdgeList(bad_root), InvalidArgument);
  std::istringstream loop("n 3 root 0\n1 1\n");
  EXPECT_THROW(ReadEdgeList(loop), InvalidArgument);
}

TEST(MarksTest, RestrictAndValidate) {
  const Marks m = Marks::Vector(2, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(m.size(), 3);
  const std::vector<int> pick{2, 0};
  const Marks r = m.Restrict(pick);
  EXPECT_EQ(r.values, (std::vector<double>{4, 5, 0, 1}));
  RootedGraph rg{Path(3), 0, {0, 1, 2}};
  EXPECT_THROW(MakeMarkedGraph(rg, Marks::Discrete({0, 1})), InvalidArgument);
  EXPECT_NO_THROW(MakeMarkedGraph(rg, Marks::Discrete({0, 1, 1})));
}

}  // namespace
}  // namespace lwsim
