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

#include "lwsim/local_topology.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>
#include <utility>
#include <vector>

#include "lwsim/assignment.hpp"
#include "lwsim/errors.hpp"
#include "lwsim/parallel.hpp"

namespace lwsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// BFS tree of a rooted tree: order, parent and children lists.
struct RootedTreeView {
  std::vector<int> order;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  std::vector<std::string> code;  // AHU code of each subtree
};

RootedTreeView ViewTree(const Graph& g, int root) {
  const int n = g.num_vertices();
  RootedTreeView t;
  t.parent.assign(static_cast<std::size_t>(n), -1);
  t.children.resize(static_cast<std::size_t>(n));
  t.order.reserve(static_cast<std::size_t>(n));
  t.order.push_back(root);
  t.parent[root] = root;
  for (std::size_t head = 0; head < t.order.size(); ++head) {
    const int v = t.order[head];
    for (int u : g.neighbors(v)) {
      if (t.parent[u] < 0) {
        t.parent[u] = v;
        t.children[v].push_back(u);
        t.order.push_back(u);
      }
    }
  }
  t.code.resize(static_cast<std::size_t>(n));
  std::vector<const std::string*> parts;
  for (auto it = t.order.rbegin(); it != t.order.rend(); ++it) {
    const int v = *it;
    parts.clear();
    for (int c : t.children[v]) parts.push_back(&t.code[c]);
    std::sort(parts.begin(), parts.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });
    std::string& s = t.code[v];
    std::size_t len = 2;
    for (const auto* p : parts) len += p->size();
    s.reserve(len);
    s.push_back('(');
    for (const auto* p : parts) s += *p;
    s.push_back(')');
  }
  return t;
}

// ---------------------------------------------------------------------------
// Canonical form of small general graphs by individualisation-refinement:
// the minimal adjacency string over all leaves of the search tree.

class GeneralCanonizer {
 public:
  // `labels` are isomorphism-invariant vertex decorations that the canonical
  // form must preserve (the hanging trees stripped off beforehand).
  GeneralCanonizer(const Graph& g, int root, std::vector<std::string> labels,
                   std::int64_t leaf_budget)
      : g_(g), n_(g.num_vertices()), budget_(leaf_budget), labels_(std::move(labels)) {
    const auto dist = BfsDistances(g, std::vector<int>{root});
    using Key = std::tuple<int, int, const std::string*>;
    std::vector<Key> key(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) key[v] = {dist[v], g.degree(v), &labels_[v]};
    auto less = [](const Key& a, const Key& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
      if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
      return *std::get<2>(a) < *std::get<2>(b);
    };
    auto sorted = key;
    std::sort(sorted.begin(), sorted.end(), less);
    initial_.resize(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) {
      initial_[v] = static_cast<int>(
          std::lower_bound(sorted.begin(), sorted.end(), key[v], less) - sorted.begin());
    }
    // Dense ranks.
    auto ranks = initial_;
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    for (int& c : initial_) {
      c = static_cast<int>(std::lower_bound(ranks.begin(), ranks.end(), c) - ranks.begin());
    }
  }

  std::string Run() {
    Search(initial_);
    return best_;
  }

 private:
  // Refines to the coarsest equitable partition; colours stay ranks of an
  // isomorphism-invariant signature order.
  void Refine(std::vector<int>& colour) const {
    int classes = *std::max_element(colour.begin(), colour.end()) + 1;
    std::vector<std::vector<int>> sig(static_cast<std::size_t>(n_));
    for (;;) {
      for (int v = 0; v < n_; ++v) {
        auto& s = sig[v];
        s.clear();
        s.push_back(colour[v]);
        for (int u : g_.neighbors(v)) s.push_back(colour[u]);
        std::sort(s.begin() + 1, s.end());
      }
      std::vector<int> idx(static_cast<std::size_t>(n_));
      for (int v = 0; v < n_; ++v) idx[v] = v;
      std::sort(idx.begin(), idx.end(),
                [&](int a, int b) { return sig[a] < sig[b]; });
      std::vector<int> next(static_cast<std::size_t>(n_));
      int c = 0;
      for (int i = 0; i < n_; ++i) {
        if (i > 0 && sig[idx[i]] != sig[idx[i - 1]]) ++c;
        next[idx[i]] = c;
      }
      colour.swap(next);
      if (c + 1 == classes) return;
      classes = c + 1;
    }
  }

  void Search(std::vector<int> colour) {
    Refine(colour);
    std::vector<int> cell_size(static_cast<std::size_t>(n_), 0);
    for (int c : colour) ++cell_size[c];
    int target = -1;
    for (int c = 0; c < n_; ++c) {
      if (cell_size[c] > 1) {
        target = c;
        break;
      }
    }
    if (target < 0) {
      if (++leaves_ > budget_) {
        throw SizeLimitError("canonical code: search leaf budget exceeded");
      }
      std::string code = Encode(colour);
      if (best_.empty() || code < best_) best_ = std::move(code);
      return;
    }
    for (int v = 0; v < n_; ++v) {
      if (colour[v] != target) continue;
      std::vector<int> split(colour);
      for (int u = 0; u < n_; ++u) {
        if (colour[u] > target || (colour[u] == target && u != v)) ++split[u];
      }
      Search(std::move(split));
    }
  }

  std::string Encode(const std::vector<int>& position) const {
    std::vector<int> at(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) at[position[v]] = v;
    std::string code;
    code.push_back('G');
    code.push_back(static_cast<char>(n_ >> 8));
    code.push_back(static_cast<char>(n_ & 0xff));
    unsigned char byte = 0;
    int bits = 0;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        byte = static_cast<unsigned char>((byte << 1) | (g_.has_edge(at[i], at[j]) ? 1 : 0));
        if (++bits == 8) {
          code.push_back(static_cast<char>(byte));
          byte = 0;
          bits = 0;
        }
      }
    }
    if (bits > 0) code.push_back(static_cast<char>(byte << (8 - bits)));
    for (int i = 0; i < n_; ++i) {
      code.push_back('|');
      code += labels_[at[i]];
    }
    return code;
  }

  const Graph& g_;
  int n_;
  std::int64_t budget_;
  std::int64_t leaves_ = 0;
  std::vector<std::string> labels_;
  std::vector<int> initial_;
  std::string best_;
};

// ---------------------------------------------------------------------------
// Optimal mark matching on isomorphic rooted trees.

class TreeMatcher {
 public:
  TreeMatcher(const RootedTreeView& ta, const Marks& xa, const RootedTreeView& tb,
              const Marks& xb, MarkAggregation agg)
      : ta_(ta), xa_(xa), tb_(tb), xb_(xb), agg_(agg) {}

  double Cost(int u, int w) {
    const auto key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(w);
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
    double total = MarkDistance(xa_.kind, xa_.at(u), xb_.at(w));
    // Children grouped by subtree code; codes match because the subtrees are
    // isomorphic.
    auto groups = [](const RootedTreeView& t, int v) {
      std::map<std::string, std::vector<int>> g;
      for (int c : t.children[v]) g[t.code[c]].push_back(c);
      return g;
    };
    const auto ga = groups(ta_, u);
    const auto gb = groups(tb_, w);
    for (const auto& [code, kids_a] : ga) {
      const auto& kids_b = gb.at(code);
      const int m = static_cast<int>(kids_a.size());
      double part = 0.0;
      if (m == 1) {
        part = Cost(kids_a[0], kids_b[0]);
      } else {
        CostMatrix c(m);
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < m; ++j) c(i, j) = Cost(kids_a[i], kids_b[j]);
        }
        part = agg_ == MarkAggregation::kMax ? BottleneckAssignment(c).value
                                             : MinSumAssignment(c).value;
      }
      total = agg_ == MarkAggregation::kMax ? std::max(total, part) : total + part;
    }
    memo_.emplace(key, total);
    return total;
  }

 private:
  const RootedTreeView& ta_;
  const Marks& xa_;
  const RootedTreeView& tb_;
  const Marks& xb_;
  MarkAggregation agg_;
  std::map<std::uint64_t, double> memo_;
};

// Exhaustive root-preserving isomorphism search for small general graphs.
class IsoEnumerator {
 public:
  IsoEnumerator(const RootedGraph& a, const Marks& xa, const RootedGraph& b,
                const Marks& xb, MarkAggregation agg, std::int64_t cap)
      : a_(a), xa_(xa), b_(b), xb_(xb), agg_(agg), cap_(cap) {
    const int n = a.size();
    da_ = BfsDistances(a.graph, std::vector<int>{a.root});
    db_ = BfsDistances(b.graph, std::vector<int>{b.root});
    parent_.assign(static_cast<std::size_t>(n), -1);
    order_.push_back(a.root);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    seen[a.root] = 1;
    for (std::size_t h = 0; h < order_.size(); ++h) {
      for (int u : a.graph.neighbors(order_[h])) {
        if (!seen[u]) {
          seen[u] = 1;
          parent_[u] = order_[h];
          order_.push_back(u);
        }
      }
    }
    phi_.assign(static_cast<std::size_t>(n), -1);
    used_.assign(static_cast<std::size_t>(b.size()), 0);
  }

  double Run() {
    if (a_.size() != b_.size() || a_.graph.num_edges() != b_.graph.num_edges() ||
        static_cast<int>(order_.size()) != a_.size()) {
      return kInf;
    }
    Extend(0, 0.0);
    return best_;
  }

 private:
  void Extend(std::size_t idx, double partial) {
    if (agg_ == MarkAggregation::kMax && partial >= best_) return;
    if (idx == order_.size()) {
      if (++found_ > cap_) {
        throw SizeLimitError("isomorphism enumeration cap exceeded");
      }
      const double value =
          agg_ == MarkAggregation::kMax ? partial : partial / a_.size();
      best_ = std::min(best_, value);
      return;
    }
    const int v = order_[idx];
    auto try_candidate = [&](int w) {
      if (used_[w] || da_[v] != db_[w] ||
          a_.graph.degree(v) != b_.graph.degree(w)) {
        return;
      }
      for (std::size_t j = 0; j < idx; ++j) {
        const int u = order_[j];
        if (a_.graph.has_edge(v, u) != b_.graph.has_edge(w, phi_[u])) return;
      }
      const double d = MarkDistance(xa_.kind, xa_.at(v), xb_.at(w));
      phi_[v] = w;
      used_[w] = 1;
      Extend(idx + 1, agg_ == MarkAggregation::kMax ? std::max(partial, d)
                                                    : partial + d);
      used_[w] = 0;
      phi_[v] = -1;
    };
    if (idx == 0) {
      try_candidate(b_.root);
    } else {
      for (int w : b_.graph.neighbors(phi_[parent_[v]])) try_candidate(w);
    }
  }

  const RootedGraph& a_;
  const Marks& xa_;
  const RootedGraph& b_;
  const Marks& xb_;
  MarkAggregation agg_;
  std::int64_t cap_;
  std::vector<int> da_, db_, parent_, order_, phi_;
  std::vector<char> used_;
  std::int64_t found_ = 0;
  double best_ = kInf;
};

}  // namespace

bool IsTree(const Graph& g) {
  if (g.num_vertices() == 0) return false;
  if (g.num_edges() != g.num_vertices() - 1) return false;
  const auto d = BfsDistances(g, std::vector<int>{0});
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

BallCode CanonicalCode(const RootedGraph& rg, const CanonicalOptions& opts) {
  if (rg.root < 0 || rg.root >= rg.size()) {
    throw InvalidArgument("canonical code: root out of range");
  }
  if (IsTree(rg.graph)) {
    auto view = ViewTree(rg.graph, rg.root);
    return "T" + std::move(view.code[rg.root]);
  }
  // Strip hanging trees (never the root) into AHU labels on the core. Only
  // the root's component is pruned, where the result is order independent.
  const Graph& g = rg.graph;
  const int n = rg.size();
  const auto reach = BfsDistances(g, std::vector<int>{rg.root});
  std::vector<int> deg = g.degrees();
  std::vector<char> removed(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<std::string>> hang(static_cast<std::size_t>(n));
  std::vector<int> queue;
  for (int v = 0; v < n; ++v) {
    if (v != rg.root && deg[v] == 1 && reach[v] >= 0) queue.push_back(v);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    if (deg[v] != 1) continue;
    removed[v] = 1;
    auto& parts = hang[v];
    std::sort(parts.begin(), parts.end());
    std::string code = "(";
    for (const auto& p : parts) code += p;
    code.push_back(')');
    for (int u : g.neighbors(v)) {
      if (removed[u]) continue;
      hang[u].push_back(std::move(code));
      if (--deg[u] == 1 && u != rg.root) queue.push_back(u);
      break;
    }
    --deg[v];
  }
  std::vector<int> core;
  for (int v = 0; v < n; ++v) {
    if (!removed[v]) core.push_back(v);
  }
  if (static_cast<int>(core.size()) > opts.max_general_vertices) {
    throw SizeLimitError("canonical code: non-tree core with " +
                         std::to_string(core.size()) + " vertices exceeds cap " +
                         std::to_string(opts.max_general_vertices));
  }
  std::vector<std::string> labels;
  labels.reserve(core.size());
  for (int v : core) {
    auto& parts = hang[v];
    std::sort(parts.begin(), parts.end());
    std::string label;
    for (const auto& p : parts) label += p;
    labels.push_back(std::move(label));
  }
  const RootedGraph reduced = InducedRooted(g, core, rg.root);
  GeneralCanonizer canon(reduced.graph, reduced.root, std::move(labels),
                         opts.max_search_leaves);
  return canon.Run();
}

bool RootedIsomorphic(const RootedGraph& a, const RootedGraph& b,
                      const CanonicalOptions& opts) {
  if (a.size() != b.size() || a.graph.num_edges() != b.graph.num_edges()) {
    return false;
  }
  return CanonicalCode(a, opts) == CanonicalCode(b, opts);
}

std::string CodeHex(const BallCode& code) {
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned char c : code) os << std::setw(2) << static_cast<int>(c);
  return os.str();
}

Interval DStarUnmarked(const RootedGraph& a, const RootedGraph& b, int k_max,
                       const CanonicalOptions& opts) {
  if (k_max < 0) throw InvalidArgument("d_star: k_max must be >= 0");
  Interval out;
  for (int k = 1; k <= k_max; ++k) {
    const RootedGraph ba = Ball(a.graph, a.root, k);
    const RootedGraph bb = Ball(b.graph, b.root, k);
    if (!RootedIsomorphic(ba, bb, opts)) {
      // B_j(B_k) = B_j, so every larger radius also differs.
      for (int j = k; j <= k_max; ++j) out.lower += std::ldexp(1.0, -j);
      break;
    }
    if (ba.size() == a.size() && bb.size() == b.size()) break;
  }
  out.upper = out.lower + std::ldexp(1.0, -k_max);
  return out;
}

double MarkDistance(MarkKind kind, std::span<const double> a,
                    std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("mark dimension mismatch");
  if (kind == MarkKind::kDiscrete) {
    return std::equal(a.begin(), a.end(), b.begin()) ? 0.0 : 1.0;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double BestIsomorphismCost(const RootedGraph& a, const Marks& xa,
                           const RootedGraph& b, const Marks& xb,
                           MarkAggregation agg,
                           const IsomorphismSearchOptions& opts) {
  if (xa.size() != a.size() || xb.size() != b.size()) {
    throw InvalidArgument("marks do not match graph sizes");
  }
  if (xa.kind != xb.kind || xa.dim != xb.dim) {
    throw InvalidArgument("marks are not comparable (kind or dimension differ)");
  }
  if (a.size() != b.size() || a.graph.num_edges() != b.graph.num_edges()) {
    return kInf;
  }
  const bool ta = IsTree(a.graph);
  if (ta != IsTree(b.graph)) return kInf;
  if (ta) {
    const auto va = ViewTree(a.graph, a.root);
    const auto vb = ViewTree(b.graph, b.root);
    if (va.code[a.root] != vb.code[b.root]) return kInf;
    TreeMatcher matcher(va, xa, vb, xb, agg);
    const double c = matcher.Cost(a.root, b.root);
    return agg == MarkAggregation::kMax ? c : c / a.size();
  }
  if (a.size() > opts.max_general_vertices) {
    throw SizeLimitError("isomorphism enumeration: non-tree ball with " +
                         std::to_string(a.size()) + " vertices exceeds cap " +
                         std::to_string(opts.max_general_vertices));
  }
  IsoEnumerator e(a, xa, b, xb, agg, opts.max_isomorphisms);
  return e.Run();
}

Interval DStarMarked(const MarkedGraph& a, const MarkedGraph& b, int k_max,
                     MarkAggregation agg, const IsomorphismSearchOptions& opts) {
  if (k_max < 0) throw InvalidArgument("d_star: k_max must be >= 0");
  if (a.marks.kind != b.marks.kind || a.marks.dim != b.marks.dim) {
    throw InvalidArgument("d_star: marks are not comparable");
  }
  Interval out;
  for (int k = 1; k <= k_max; ++k) {
    const RootedGraph ba = Ball(a.rooted.graph, a.rooted.root, k);
    const RootedGraph bb = Ball(b.rooted.graph, b.rooted.root, k);
    const double cost = BestIsomorphismCost(ba, a.marks.Restrict(ba.origin), bb,
                                            b.marks.Restrict(bb.origin), agg, opts);
    if (std::isinf(cost)) {
      for (int j = k; j <= k_max; ++j) out.lower += std::ldexp(1.0, -j);
      break;
    }
    out.lower += std::ldexp(1.0, -k) * std::min(1.0, cost);
  }
  out.upper = out.lower + std::ldexp(1.0, -k_max);
  return out;
}

// ---------------------------------------------------------------------------

double BallHistogram::Frequency(const BallCode& code) const {
  if (total == 0) return 0.0;
  const auto it = counts.find(code);
  return it == counts.end() ? 0.0
                            : static_cast<double>(it->second) / static_cast<double>(total);
}

void BallHistogram::Add(const BallCode& code, std::int64_t count) {
  counts[code] += count;
  total += count;
}

void BallHistogram::Merge(const BallHistogram& other) {
  if (other.radius != radius) throw InvalidArgument("histogram radius mismatch");
  for (const auto& [code, c] : other.counts) counts[code] += c;
  total += other.total;
}

namespace {

template <typename CodeOf>
BallHistogram ChunkedHistogram(std::int64_t n, int r, int threads, CodeOf code_of) {
  const std::int64_t chunks =
      std::min<std::int64_t>(n, std::max(1, threads) * std::int64_t{8});
  std::vector<BallHistogram> parts(static_cast<std::size_t>(std::max<std::int64_t>(chunks, 0)));
  ParallelFor(parts.size(), threads, [&](std::size_t c) {
    BallHistogram& h = parts[c];
    h.radius = r;
    const std::int64_t lo = n * static_cast<std::int64_t>(c) / chunks;
    const std::int64_t hi = n * static_cast<std::int64_t>(c + 1) / chunks;
    for (std::int64_t i = lo; i < hi; ++i) h.Add(code_of(i));
  });
  BallHistogram out;
  out.radius = r;
  for (const auto& p : parts) out.Merge(p);
  return out;
}

}  // namespace

BallHistogram NeighborhoodHistogram(const Graph& g, int r, int threads,
                                    const CanonicalOptions& opts) {
  if (r < 0) throw InvalidArgument("histogram radius must be >= 0");
  return ChunkedHistogram(g.num_vertices(), r, threads, [&](std::int64_t v) {
    return CanonicalCode(Ball(g, static_cast<int>(v), r), opts);
  });
}

BallHistogram SampledHistogram(const RootedSampler& sampler, int r,
                               std::int64_t n_samples, Seed seed, int threads,
                               const CanonicalOptions& opts) {
  if (r < 0) throw InvalidArgument("histogram radius must be >= 0");
  return ChunkedHistogram(n_samples, r, threads, [&](std::int64_t i) {
    const RootedGraph t = sampler(DeriveSeed(seed, static_cast<std::uint64_t>(i)));
    return CanonicalCode(Ball(t.graph, t.root, r), opts);
  });
}

double HistogramTv(const BallHistogram& a, const BallHistogram& b) {
  if (a.radius != b.radius) throw InvalidArgument("histogram radius mismatch");
  if (a.total == 0 || b.total == 0) throw InvalidArgument("empty histogram");
  const double na = static_cast<double>(a.total);
  const double nb = static_cast<double>(b.total);
  double sum = 0.0;
  auto ia = a.counts.begin();
  auto ib = b.counts.begin();
  while (ia != a.counts.end() || ib != b.counts.end()) {
    if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
      sum += static_cast<double>(ia->second) / na;
      ++ia;
    } else if (ia == a.counts.end() || ib->first < ia->first) {
      sum += static_cast<double>(ib->second) / nb;
      ++ib;
    } else {
      sum += std::abs(static_cast<double>(ia->second) / na -
                      static_cast<double>(ib->second) / nb);
      ++ia;
      ++ib;
    }
  }
  return std::min(1.0, 0.5 * sum);
}

double LwDeficiency(const Graph& g, const RootedSampler& limit_sampler, int r,
                    std::int64_t n_samples, Seed seed, int threads,
                    const CanonicalOptions& opts) {
  const auto observed = NeighborhoodHistogram(g, r, threads, opts);
  const auto limit = SampledHistogram(limit_sampler, r, n_samples, seed, threads, opts);
  return HistogramTv(observed, limit);
}

void WriteHistogramCsv(std::ostream& out, const BallHistogram& h) {
  out << "code_hex,count\n";
  for (const auto& [code, c] : h.counts) out << CodeHex(code) << ',' << c << '\n';
}

}  // namespace lwsim
