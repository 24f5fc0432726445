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
#include <deque>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lwsim/errors.hpp"

namespace lwsim {
namespace {

// Multiplies with a cap; returns cap + 1 on overflow.
std::int64_t CappedMul(std::int64_t a, std::int64_t b, std::int64_t cap) {
  if (a == 0 || b == 0) return 0;
  if (a > (cap + 1) / b + 1) return cap + 1;
  return std::min(a * b, cap + 1);
}

void CheckCap(std::int64_t count, std::int64_t cap, const char* what) {
  if (count > cap) {
    throw SizeLimitError(std::string(what) + ": vertex count exceeds cap of " +
                         std::to_string(cap));
  }
}

}  // namespace

Graph Graph::FromEdges(int num_vertices, std::span<const Edge> edges) {
  if (num_vertices < 0) throw InvalidArgument("negative vertex count");
  Graph g;
  g.num_vertices_ = num_vertices;
  std::vector<std::int64_t> deg(static_cast<std::size_t>(num_vertices) + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices) {
      throw InvalidArgument("edge endpoint out of range: " + std::to_string(u) +
                            " " + std::to_string(v));
    }
    if (u == v) throw InvalidArgument("self-loop at vertex " + std::to_string(u));
    ++deg[u + 1];
    ++deg[v + 1];
  }
  std::partial_sum(deg.begin(), deg.end(), deg.begin());
  g.offsets_ = deg;
  g.targets_.assign(static_cast<std::size_t>(g.offsets_.back()), 0);
  std::vector<std::int64_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    g.targets_[fill[u]++] = v;
    g.targets_[fill[v]++] = u;
  }
  for (int v = 0; v < num_vertices; ++v) {
    auto first = g.targets_.begin() + g.offsets_[v];
    auto last = g.targets_.begin() + g.offsets_[v + 1];
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last) {
      throw InvalidArgument("duplicate edge at vertex " + std::to_string(v));
    }
  }
  return g;
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= num_vertices_ || v >= num_vertices_) return false;
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(num_edges()));
  for (int u = 0; u < num_vertices_; ++u) {
    for (int v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> out(static_cast<std::size_t>(num_vertices_));
  for (int v = 0; v < num_vertices_; ++v) out[v] = degree(v);
  return out;
}

Marks Marks::Discrete(std::vector<int> symbols) {
  Marks m;
  m.kind = MarkKind::kDiscrete;
  m.dim = 1;
  m.values.assign(symbols.begin(), symbols.end());
  return m;
}

Marks Marks::Vector(int dim, std::vector<double> values) {
  if (dim <= 0 || values.size() % static_cast<std::size_t>(dim) != 0) {
    throw InvalidArgument("vector marks: size is not a multiple of dim");
  }
  Marks m;
  m.kind = MarkKind::kVector;
  m.dim = dim;
  m.values = std::move(values);
  return m;
}

Marks Marks::Restrict(std::span<const int> vertices) const {
  Marks out;
  out.kind = kind;
  out.dim = dim;
  out.values.reserve(vertices.size() * static_cast<std::size_t>(dim));
  for (int v : vertices) {
    const auto x = at(v);
    out.values.insert(out.values.end(), x.begin(), x.end());
  }
  return out;
}

MarkedGraph MakeMarkedGraph(RootedGraph rooted, Marks marks) {
  if (marks.size() != rooted.size()) {
    throw InvalidArgument("marks length " + std::to_string(marks.size()) +
                          " does not match vertex count " +
                          std::to_string(rooted.size()));
  }
  return {std::move(rooted), std::move(marks)};
}

void ValidateGraph(const Graph& g) {
  const int n = g.num_vertices();
  for (int v = 0; v < n; ++v) {
    const auto nb = g.neighbors(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const int u = nb[i];
      if (u < 0 || u >= n) throw InvalidArgument("neighbor index out of range");
      if (u == v) throw InvalidArgument("self-loop");
      if (i > 0 && nb[i - 1] >= u) {
        throw InvalidArgument("adjacency not strictly sorted");
      }
      if (!g.has_edge(u, v)) throw InvalidArgument("adjacency not symmetric");
    }
  }
}

// ---------------------------------------------------------------------------

Graph GenErdosRenyi(int n, double p, Seed seed) {
  if (n < 1) throw InvalidArgument("GenErdosRenyi: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("GenErdosRenyi: p must lie in [0, 1]");
  }
  std::vector<Edge> edges;
  if (p == 1.0) {
    for (int v = 1; v < n; ++v) {
      for (int w = 0; w < v; ++w) edges.emplace_back(w, v);
    }
  } else if (p > 0.0) {
    // Geometric skipping over the pairs (w, v), w < v, in row-major order.
    CounterRng rng(seed);
    const double log_q = std::log1p(-p);
    std::int64_t v = 1;
    std::int64_t w = -1;
    while (v < n) {
      const double r = rng.Uniform();
      const double skip = std::floor(std::log1p(-r) / log_q);
      w += 1 + static_cast<std::int64_t>(
                   std::min(skip, static_cast<double>(std::int64_t{1} << 52)));
      while (w >= v && v < n) {
        w -= v;
        ++v;
      }
      if (v < n) edges.emplace_back(static_cast<int>(w), static_cast<int>(v));
    }
  }
  return Graph::FromEdges(n, edges);
}

Graph GenGnm(int n, std::int64_t m, Seed seed) {
  if (n < 1) throw InvalidArgument("GenGnm: n must be >= 1");
  const std::int64_t pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
  if (m < 0 || m > pairs) {
    throw InvalidArgument("GenGnm: m=" + std::to_string(m) +
                          " exceeds n(n-1)/2=" + std::to_string(pairs));
  }
  // Floyd's sampling of m distinct pair indices out of `pairs`.
  CounterRng rng(seed);
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(m) * 2);
  for (std::int64_t j = pairs - m; j < pairs; ++j) {
    const auto t = static_cast<std::int64_t>(
        rng.UniformInt(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::int64_t> idx(chosen.begin(), chosen.end());
  std::sort(idx.begin(), idx.end());
  std::vector<Edge> edges;
  edges.reserve(idx.size());
  // Pair index t enumerates (w, v), w < v, as t = v(v-1)/2 + w.
  for (std::int64_t t : idx) {
    auto v = static_cast<std::int64_t>(
        std::floor((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(t))) / 2.0));
    while (v * (v - 1) / 2 > t) --v;
    while ((v + 1) * v / 2 <= t) ++v;
    const std::int64_t w = t - v * (v - 1) / 2;
    edges.emplace_back(static_cast<int>(w), static_cast<int>(v));
  }
  return Graph::FromEdges(n, edges);
}

ConfigurationModelResult GenConfigurationModel(std::span<const int> degrees,
                                               Seed seed, int max_attempts) {
  const int n = static_cast<int>(degrees.size());
  if (n < 1) throw InvalidArgument("configuration model: empty degree list");
  std::int64_t total = 0;
  for (int d : degrees) {
    if (d < 0) throw InvalidArgument("configuration model: negative degree");
    if (d >= n) {
      throw InvalidArgument("configuration model: degree " + std::to_string(d) +
                            " not below n=" + std::to_string(n));
    }
    total += d;
  }
  if (total % 2 != 0) {
    throw InvalidArgument("configuration model: degree sum is odd");
  }
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(total));
  for (int v = 0; v < n; ++v) stubs.insert(stubs.end(), degrees[v], v);

  CounterRng rng(seed);
  std::vector<Edge> edges(static_cast<std::size_t>(total / 2));
  ConfigurationModelResult result;
  for (int attempt = 1; attempt <= std::max(max_attempts, 1); ++attempt) {
    result.attempts = attempt;
    rng.Shuffle(std::span<int>(stubs));
    bool simple = true;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      int u = stubs[2 * i];
      int v = stubs[2 * i + 1];
      if (u == v) simple = false;
      if (u > v) std::swap(u, v);
      edges[i] = {u, v};
    }
    std::sort(edges.begin(), edges.end());
    if (simple && std::adjacent_find(edges.begin(), edges.end()) == edges.end()) {
      result.graph = Graph::FromEdges(n, edges);
      return result;
    }
  }
  // Erased model on the last pairing.
  std::vector<Edge> kept;
  kept.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.first != e.second && (kept.empty() || kept.back() != e)) {
      kept.push_back(e);
    }
  }
  result.graph = Graph::FromEdges(n, kept);
  result.erased = true;
  return result;
}

ConfigurationModelResult GenRandomRegular(int n, int k, Seed seed,
                                          int max_attempts) {
  if (n < 1 || k < 0) throw InvalidArgument("random regular: bad n or k");
  if (k >= n) throw InvalidArgument("random regular: need k < n");
  if ((static_cast<std::int64_t>(n) * k) % 2 != 0) {
    throw InvalidArgument("random regular: n*k must be even");
  }
  const std::vector<int> degrees(static_cast<std::size_t>(n), k);
  return GenConfigurationModel(degrees, seed, max_attempts);
}

bool DegreesBelowGrowthBound(std::span<const int> degrees, double delta) {
  const double n = static_cast<double>(degrees.size());
  const double bound = std::pow(n, 0.25 - delta);
  return std::all_of(degrees.begin(), degrees.end(),
                     [&](int d) { return static_cast<double>(d) < bound; });
}

// ---------------------------------------------------------------------------

LatticeBox::LatticeBox(int dim, int n) : dim_(dim), n_(n) {
  if (dim < 1) throw InvalidArgument("lattice: dim must be >= 1");
  if (n < 0) throw InvalidArgument("lattice: n must be >= 0");
}

std::int64_t LatticeBox::num_vertices() const {
  std::int64_t count = 1;
  for (int i = 0; i < dim_; ++i) {
    count = CappedMul(count, side(), std::numeric_limits<std::int64_t>::max() / 4);
  }
  return count;
}

int LatticeBox::Index(std::span<const int> coords) const {
  std::int64_t idx = 0;
  for (int i = 0; i < dim_; ++i) {
    if (coords[i] < -n_ || coords[i] > n_) {
      throw InvalidArgument("lattice coordinate outside box");
    }
    idx = idx * side() + (coords[i] + n_);
  }
  return static_cast<int>(idx);
}

std::vector<int> LatticeBox::Coords(int index) const {
  std::vector<int> c(static_cast<std::size_t>(dim_));
  for (int i = dim_ - 1; i >= 0; --i) {
    c[i] = index % side() - n_;
    index /= side();
  }
  return c;
}

RootedGraph GenLatticeBox(int dim, int n, std::int64_t vertex_cap) {
  const LatticeBox box(dim, n);
  const std::int64_t count = box.num_vertices();
  CheckCap(count, std::min<std::int64_t>(vertex_cap,
                                         std::numeric_limits<int>::max()),
           "lattice box");
  const int nv = static_cast<int>(count);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(nv) * dim);
  std::vector<std::int64_t> stride(static_cast<std::size_t>(dim), 1);
  for (int i = dim - 2; i >= 0; --i) stride[i] = stride[i + 1] * box.side();
  for (int v = 0; v < nv; ++v) {
    const auto c = box.Coords(v);
    for (int i = 0; i < dim; ++i) {
      if (c[i] < n) edges.emplace_back(v, static_cast<int>(v + stride[i]));
    }
  }
  RootedGraph rg;
  rg.graph = Graph::FromEdges(nv, edges);
  rg.root = box.Index(std::vector<int>(static_cast<std::size_t>(dim), 0));
  rg.origin.resize(static_cast<std::size_t>(nv));
  std::iota(rg.origin.begin(), rg.origin.end(), 0);
  return rg;
}

std::int64_t RegularTreeSize(int k, int height) {
  if (k < 1 || height < 0) throw InvalidArgument("regular tree: bad k or height");
  std::int64_t total = 1;
  std::int64_t level = 1;
  const std::int64_t cap = std::numeric_limits<std::int64_t>::max() / 4;
  for (int h = 1; h <= height; ++h) {
    level = CappedMul(level, h == 1 ? k : k - 1, cap);
    if (level == 0) break;
    total = std::min(total + level, cap + 1);
  }
  return total;
}

RootedGraph GenRegularTree(int k, int height, std::int64_t vertex_cap) {
  const std::int64_t count = RegularTreeSize(k, height);
  CheckCap(count, std::min<std::int64_t>(vertex_cap,
                                         std::numeric_limits<int>::max()),
           "regular tree");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(count));
  std::vector<int> frontier{0};
  int next = 1;
  for (int h = 0; h < height; ++h) {
    std::vector<int> children;
    for (int parent : frontier) {
      const int fanout = (h == 0) ? k : k - 1;
      for (int c = 0; c < fanout; ++c) {
        edges.emplace_back(parent, next);
        children.push_back(next++);
      }
    }
    frontier = std::move(children);
    if (frontier.empty()) break;
  }
  RootedGraph rg;
  rg.graph = Graph::FromEdges(next, edges);
  rg.root = 0;
  rg.origin.resize(static_cast<std::size_t>(next));
  std::iota(rg.origin.begin(), rg.origin.end(), 0);
  return rg;
}

std::int64_t CanopyTruncation::LevelWidth(int level) const {
  std::int64_t w = base_width;
  for (int i = level; i < levels; ++i) w *= (d - 1);
  return w;
}

std::int64_t CanopyTruncation::CanopyIndex(int level, std::int64_t j) const {
  std::int64_t offset = 0;
  for (int i = 0; i < level; ++i) offset += LevelWidth(i);
  return offset + j;
}

std::pair<int, std::int64_t> CanopyTruncation::Coordinates(
    std::int64_t flat) const {
  for (int i = 0; i <= levels; ++i) {
    const std::int64_t w = LevelWidth(i);
    if (flat < w) return {i, flat};
    flat -= w;
  }
  throw InvalidArgument("canopy index out of range");
}

CanopyTruncation GenCanopyTruncation(int d, int levels, int base_width,
                                     int root_level, std::int64_t vertex_cap) {
  if (d < 3) throw InvalidArgument("canopy: d must be >= 3");
  if (levels < 1) throw InvalidArgument("canopy: levels must be >= 1");
  if (base_width < 1) throw InvalidArgument("canopy: base_width must be >= 1");
  if (root_level < 0 || root_level > levels) {
    throw InvalidArgument("canopy: root_level outside [0, levels]");
  }
  CanopyTruncation ct;
  ct.d = d;
  ct.levels = levels;
  ct.base_width = base_width;
  ct.root_level = root_level;

  const std::int64_t cap =
      std::min<std::int64_t>(vertex_cap, std::numeric_limits<int>::max());
  std::int64_t total = 0;
  std::int64_t w = base_width;
  for (int i = levels; i >= 0; --i) {
    total += w;
    CheckCap(total, cap, "canopy truncation");
    if (i > 0) w = CappedMul(w, d - 1, cap);
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(total));
  std::int64_t offset = 0;
  for (int i = 0; i < levels; ++i) {
    const std::int64_t width = ct.LevelWidth(i);
    const std::int64_t up = offset + width;
    for (std::int64_t j = 0; j < width; ++j) {
      edges.emplace_back(static_cast<int>(offset + j),
                         static_cast<int>(up + j / (d - 1)));
    }
    offset = up;
  }
  const Graph full = Graph::FromEdges(static_cast<int>(total), edges);
  ct.rooted = ComponentOf(full, static_cast<int>(ct.CanopyIndex(root_level, 0)));
  return ct;
}

// ---------------------------------------------------------------------------

RootedGraph InducedRooted(const Graph& g, std::span<const int> vertices,
                          int root) {
  std::unordered_map<int, int> local;
  local.reserve(vertices.size() * 2);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!local.emplace(vertices[i], static_cast<int>(i)).second) {
      throw InvalidArgument("InducedRooted: repeated vertex");
    }
  }
  const auto it = local.find(root);
  if (it == local.end()) throw InvalidArgument("InducedRooted: root not in set");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (int u : g.neighbors(vertices[i])) {
      const auto jt = local.find(u);
      if (jt != local.end() && static_cast<int>(i) < jt->second) {
        edges.emplace_back(static_cast<int>(i), jt->second);
      }
    }
  }
  RootedGraph rg;
  rg.graph = Graph::FromEdges(static_cast<int>(vertices.size()), edges);
  rg.root = it->second;
  rg.origin.assign(vertices.begin(), vertices.end());
  return rg;
}

std::vector<int> BfsDistances(const Graph& g, std::span<const int> sources,
                              int max_depth) {
  std::vector<int> dist(static_cast<std::size_t>(g.num_vertices()), -1);
  std::deque<int> queue;
  for (int s : sources) {
    if (s < 0 || s >= g.num_vertices()) {
      throw InvalidArgument("BFS source out of range");
    }
    if (dist[s] < 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    if (max_depth >= 0 && dist[v] >= max_depth) continue;
    for (int u : g.neighbors(v)) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

std::vector<int> BallVertices(const Graph& g, int v, int k) {
  if (v < 0 || v >= g.num_vertices()) {
    throw InvalidArgument("ball: vertex out of range");
  }
  if (k < 0) throw InvalidArgument("ball: radius must be >= 0");
  std::vector<int> order{v};
  std::unordered_map<int, int> dist{{v, 0}};
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int x = order[head];
    const int dx = dist[x];
    if (dx >= k) continue;
    for (int u : g.neighbors(x)) {
      if (dist.emplace(u, dx + 1).second) order.push_back(u);
    }
  }
  return order;
}

RootedGraph ComponentOf(const Graph& g, int v) {
  if (v < 0 || v >= g.num_vertices()) {
    throw InvalidArgument("component_of: vertex out of range");
  }
  std::vector<char> seen(static_cast<std::size_t>(g.num_vertices()), 0);
  std::vector<int> order{v};
  seen[v] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (int u : g.neighbors(order[head])) {
      if (!seen[u]) {
        seen[u] = 1;
        order.push_back(u);
      }
    }
  }
  std::sort(order.begin(), order.end());
  return InducedRooted(g, order, v);
}

RootedGraph UniformRootComponent(const Graph& g, Seed seed) {
  if (g.num_vertices() < 1) throw InvalidArgument("empty graph");
  CounterRng rng(seed);
  return ComponentOf(g, static_cast<int>(rng.UniformInt(g.num_vertices())));
}

std::vector<int> ComponentLabels(const Graph& g) {
  std::vector<int> label(static_cast<std::size_t>(g.num_vertices()), -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < g.num_vertices(); ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : g.neighbors(v)) {
        if (label[u] < 0) {
          label[u] = next;
          stack.push_back(u);
        }
      }
    }
    ++next;
  }
  return label;
}

RootedGraph LargestComponent(const Graph& g) {
  if (g.num_vertices() < 1) throw InvalidArgument("largest_component: empty graph");
  const auto label = ComponentLabels(g);
  const int count = *std::max_element(label.begin(), label.end()) + 1;
  std::vector<int> size(static_cast<std::size_t>(count), 0);
  std::vector<int> min_vertex(static_cast<std::size_t>(count), -1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    ++size[label[v]];
    if (min_vertex[label[v]] < 0) min_vertex[label[v]] = v;
  }
  // Labels are assigned in order of smallest vertex, so the first maximum
  // wins ties.
  const int best = static_cast<int>(
      std::max_element(size.begin(), size.end()) - size.begin());
  return ComponentOf(g, min_vertex[best]);
}

RootedGraph Ball(const Graph& g, int v, int k) {
  const auto verts = BallVertices(g, v, k);
  return InducedRooted(g, verts, v);
}

RootedGraph Ball(const RootedGraph& rg, int k) {
  RootedGraph b = Ball(rg.graph, rg.root, k);
  if (!rg.origin.empty()) {
    for (int& o : b.origin) o = rg.origin[o];
  }
  return b;
}

// ---------------------------------------------------------------------------

void WriteEdgeList(std::ostream& out, const Graph& g, std::optional<int> root) {
  out << "n " << g.num_vertices() << " root ";
  if (root) {
    out << *root;
  } else {
    out << "none";
  }
  out << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

std::string EdgeListString(const Graph& g, std::optional<int> root) {
  std::ostringstream os;
  WriteEdgeList(os, g, root);
  return os.str();
}

ParsedEdgeList ReadEdgeList(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("edge list: missing header");
  std::istringstream header(line);
  std::string n_tag, root_tag, root_str;
  long long n = -1;
  if (!(header >> n_tag >> n >> root_tag >> root_str) || n_tag != "n" ||
      root_tag != "root" || n < 0) {
    throw InvalidArgument("edge list: malformed header '" + line + "'");
  }
  ParsedEdgeList parsed;
  if (root_str != "none") {
    try {
      parsed.root = std::stoi(root_str);
    } catch (const std::exception&) {
      throw InvalidArgument("edge list: bad root '" + root_str + "'");
    }
    if (*parsed.root < 0 || *parsed.root >= n) {
      throw InvalidArgument("edge list: root out of range");
    }
  }
  std::vector<Edge> edges;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    int u = 0, v = 0;
    if (!(row >> u >> v)) {
      throw InvalidArgument("edge list: malformed line " + std::to_string(line_no));
    }
    edges.emplace_back(u, v);
  }
  parsed.graph = Graph::FromEdges(static_cast<int>(n), edges);
  return parsed;
}

}  // namespace lwsim
