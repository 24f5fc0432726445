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

// Finite simple graphs, rooted components and balls, and the random and
// deterministic graph families used by the experiments.
#ifndef LWSIM_GRAPH_HPP_
#define LWSIM_GRAPH_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lwsim/random.hpp"

namespace lwsim {

using Edge = std::pair<int, int>;

inline constexpr std::int64_t kDefaultVertexCap = 10'000'000;

// Immutable simple undirected graph stored as sorted adjacency lists (CSR).
class Graph {
 public:
  Graph() = default;

  // Builds from an edge list. Rejects self-loops, duplicate edges (in either
  // orientation) and out-of-range endpoints.
  static Graph FromEdges(int num_vertices, std::span<const Edge> edges);

  int num_vertices() const { return num_vertices_; }
  std::int64_t num_edges() const {
    return static_cast<std::int64_t>(targets_.size()) / 2;
  }

  std::span<const int> neighbors(int v) const {
    return {targets_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  int degree(int v) const {
    return static_cast<int>(offsets_[v + 1] - offsets_[v]);
  }
  bool has_edge(int u, int v) const;

  // Edges with u < v, in lexicographic order.
  std::vector<Edge> edges() const;
  std::vector<int> degrees() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_vertices_ == b.num_vertices_ && a.offsets_ == b.offsets_ &&
           a.targets_ == b.targets_;
  }

 private:
  int num_vertices_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<int> targets_;
};

// Connected graph with a distinguished root. `origin` maps each local vertex
// back to its index in the graph it was extracted from (identity for graphs
// built directly by a generator).
struct RootedGraph {
  Graph graph;
  int root = 0;
  std::vector<int> origin;

  int size() const { return graph.num_vertices(); }
};

enum class MarkKind { kDiscrete, kVector };

// One mark per vertex. Discrete marks are alphabet symbols stored as
// integer-valued doubles with dim == 1.
struct Marks {
  MarkKind kind = MarkKind::kDiscrete;
  int dim = 1;
  std::vector<double> values;

  int size() const { return dim == 0 ? 0 : static_cast<int>(values.size()) / dim; }
  std::span<const double> at(int v) const {
    return {values.data() + static_cast<std::size_t>(v) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<double> at(int v) {
    return {values.data() + static_cast<std::size_t>(v) * dim,
            static_cast<std::size_t>(dim)};
  }

  static Marks Discrete(std::vector<int> symbols);
  static Marks Vector(int dim, std::vector<double> values);
  // Marks of the vertices `vertices`, in that order.
  Marks Restrict(std::span<const int> vertices) const;
};

struct MarkedGraph {
  RootedGraph rooted;
  Marks marks;
};

// Throws InvalidArgument unless marks has one entry per vertex of `rooted`.
MarkedGraph MakeMarkedGraph(RootedGraph rooted, Marks marks);

// Checks symmetry, simplicity and index range; throws InvalidArgument with a
// description of the first violation.
void ValidateGraph(const Graph& g);

// ---------------------------------------------------------------------------
// Random graphs.

Graph GenErdosRenyi(int n, double p, Seed seed);

// Uniform simple graph with exactly m edges.
Graph GenGnm(int n, std::int64_t m, Seed seed);

struct ConfigurationModelResult {
  Graph graph;
  // True when no simple pairing was found within the attempt budget and the
  // result is the erased model (self-loops removed, multi-edges collapsed).
  bool erased = false;
  int attempts = 0;
};

inline constexpr int kDefaultPairingAttempts = 100;

ConfigurationModelResult GenConfigurationModel(
    std::span<const int> degrees, Seed seed,
    int max_attempts = kDefaultPairingAttempts);

ConfigurationModelResult GenRandomRegular(
    int n, int k, Seed seed, int max_attempts = kDefaultPairingAttempts);

// True iff no degree k >= n^(1/4 - delta) occurs.
bool DegreesBelowGrowthBound(std::span<const int> degrees, double delta);

// ---------------------------------------------------------------------------
// Deterministic families.

// Integer box [-n, n]^dim with nearest-neighbour edges, rooted at the origin.
// Vertices are numbered lexicographically in their coordinates, the first
// coordinate most significant.
RootedGraph GenLatticeBox(int dim, int n,
                          std::int64_t vertex_cap = kDefaultVertexCap);

// Geometry helper for GenLatticeBox outputs.
class LatticeBox {
 public:
  LatticeBox(int dim, int n);

  int dim() const { return dim_; }
  int half_width() const { return n_; }
  int side() const { return 2 * n_ + 1; }
  std::int64_t num_vertices() const;

  int Index(std::span<const int> coords) const;
  std::vector<int> Coords(int index) const;

 private:
  int dim_;
  int n_;
};

// k-regular tree of the given height: the root and every internal vertex have
// degree k, leaves sit at distance `height` from the root.
RootedGraph GenRegularTree(int k, int height,
                           std::int64_t vertex_cap = kDefaultVertexCap);

// Closed-form vertex count of GenRegularTree.
std::int64_t RegularTreeSize(int k, int height);

// Finite window of the d-canopy tree: vertices (i, j) with 0 <= i <= levels
// and 0 <= j < base_width * (d-1)^(levels-i), edges (i, j) ~ (i+1, j/(d-1)).
// The component of (root_level, 0) is returned; `origin` holds the flat index
// CanopyIndex(i, j).
struct CanopyTruncation {
  int d = 3;
  int levels = 1;
  int base_width = 1;
  int root_level = 0;
  RootedGraph rooted;

  std::int64_t LevelWidth(int level) const;
  std::int64_t CanopyIndex(int level, std::int64_t j) const;
  std::pair<int, std::int64_t> Coordinates(std::int64_t flat) const;
};

CanopyTruncation GenCanopyTruncation(int d, int levels, int base_width,
                                     int root_level = 0,
                                     std::int64_t vertex_cap = kDefaultVertexCap);

// ---------------------------------------------------------------------------
// Components and balls.

// Induced subgraph on `vertices` (kept in the given order). The root is the
// position of `root` inside `vertices`.
RootedGraph InducedRooted(const Graph& g, std::span<const int> vertices,
                          int root);

RootedGraph ComponentOf(const Graph& g, int v);
RootedGraph UniformRootComponent(const Graph& g, Seed seed);

// Largest component; ties go to the component with the smallest minimal
// vertex, which is also the root.
RootedGraph LargestComponent(const Graph& g);

// Component label per vertex, numbered in order of each component's
// smallest vertex.
std::vector<int> ComponentLabels(const Graph& g);

// Multi-source BFS distances; unreachable vertices get -1. With max_depth
// >= 0 the search stops there.
std::vector<int> BfsDistances(const Graph& g, std::span<const int> sources,
                              int max_depth = -1);

// Vertices within distance k of v, in BFS order (v first).
std::vector<int> BallVertices(const Graph& g, int v, int k);

// B_k of a rooted graph; origin maps into the original graph of `rg`.
RootedGraph Ball(const RootedGraph& rg, int k);
RootedGraph Ball(const Graph& g, int v, int k);

// ---------------------------------------------------------------------------
// Edge-list text format:
//   n <vertex_count> root <index|none>
//   u v
//   ...
void WriteEdgeList(std::ostream& out, const Graph& g,
                   std::optional<int> root = std::nullopt);
std::string EdgeListString(const Graph& g,
                           std::optional<int> root = std::nullopt);

struct ParsedEdgeList {
  Graph graph;
  std::optional<int> root;
};
ParsedEdgeList ReadEdgeList(std::istream& in);

}  // namespace lwsim

#endif  // LWSIM_GRAPH_HPP_
