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

// Rooted-graph isomorphism classes and the local metrics built on them.
#ifndef LWSIM_LOCAL_TOPOLOGY_HPP_
#define LWSIM_LOCAL_TOPOLOGY_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "lwsim/graph.hpp"

namespace lwsim {

// Byte string identifying a rooted graph up to root-preserving isomorphism.
// Trees are encoded with a 'T' prefix, other graphs with 'G'.
using BallCode = std::string;

struct CanonicalOptions {
  // Non-tree graphs whose core (what remains after hanging trees are
  // stripped) exceeds this size are rejected.
  int max_general_vertices = 64;
  // Leaves of the individualisation-refinement search before giving up.
  std::int64_t max_search_leaves = 2'000'000;
};

// Connected graph with |E| = |V| - 1.
bool IsTree(const Graph& g);

BallCode CanonicalCode(const RootedGraph& rg, const CanonicalOptions& opts = {});
bool RootedIsomorphic(const RootedGraph& a, const RootedGraph& b,
                      const CanonicalOptions& opts = {});

// Hex rendering of a code, used by the CSV format.
std::string CodeHex(const BallCode& code);

// A distance known only up to the truncated tail of its series.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// sum_{k>=1} 2^-k 1{B_k(a) and B_k(b) not isomorphic}, truncated at k_max.
Interval DStarUnmarked(const RootedGraph& a, const RootedGraph& b, int k_max,
                       const CanonicalOptions& opts = {});

// How mark discrepancies on a ball are aggregated: the maximum over the ball
// (d_*) or the average over the ball (d_{*,1}).
enum class MarkAggregation { kMax, kMean };

struct IsomorphismSearchOptions {
  // Non-tree balls above this size are rejected.
  int max_general_vertices = 12;
  std::int64_t max_isomorphisms = 1'000'000;
};

// 0/1 distance for discrete marks, Euclidean distance for vector marks.
double MarkDistance(MarkKind kind, std::span<const double> a,
                    std::span<const double> b);

// sum_{k>=1} 2^-k min(1, inf_phi agg_v d(x_v, y_phi(v))) over root-preserving
// isomorphisms phi of the radius-k balls; empty infimum counts as 1.
Interval DStarMarked(const MarkedGraph& a, const MarkedGraph& b, int k_max,
                     MarkAggregation agg = MarkAggregation::kMax,
                     const IsomorphismSearchOptions& opts = {});

// Infimum over root-preserving isomorphisms a -> b of the aggregated mark
// distance; +inf if the rooted graphs are not isomorphic. Marks are indexed
// by local vertex.
double BestIsomorphismCost(const RootedGraph& a, const Marks& xa,
                           const RootedGraph& b, const Marks& xb,
                           MarkAggregation agg,
                           const IsomorphismSearchOptions& opts = {});

// Counts of radius-r ball types.
struct BallHistogram {
  int radius = 0;
  std::map<BallCode, std::int64_t> counts;
  std::int64_t total = 0;

  double Frequency(const BallCode& code) const;
  void Add(const BallCode& code, std::int64_t count = 1);
  void Merge(const BallHistogram& other);
};

// Histogram of B_r(C_v(g)) over every vertex v.
BallHistogram NeighborhoodHistogram(const Graph& g, int r, int threads = 1,
                                    const CanonicalOptions& opts = {});

using RootedSampler = std::function<RootedGraph(Seed)>;

// Histogram of B_r of n_samples draws; draw i uses DeriveSeed(seed, i).
BallHistogram SampledHistogram(const RootedSampler& sampler, int r,
                               std::int64_t n_samples, Seed seed,
                               int threads = 1,
                               const CanonicalOptions& opts = {});

// Total variation between the normalised histograms.
double HistogramTv(const BallHistogram& a, const BallHistogram& b);

double LwDeficiency(const Graph& g, const RootedSampler& limit_sampler, int r,
                    std::int64_t n_samples, Seed seed, int threads = 1,
                    const CanonicalOptions& opts = {});

// CSV with header "code_hex,count".
void WriteHistogramCsv(std::ostream& out, const BallHistogram& h);

}  // namespace lwsim

#endif  // LWSIM_LOCAL_TOPOLOGY_HPP_
