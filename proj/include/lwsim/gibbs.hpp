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

// Gibbs measures on finite graphs with a pairwise interaction and a
// reference law over a finite alphabet.
#ifndef LWSIM_GIBBS_HPP_
#define LWSIM_GIBBS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lwsim/graph.hpp"
#include "lwsim/random.hpp"

namespace lwsim {

// One alphabet index per vertex.
using Configuration = std::vector<int>;

struct GibbsSpec {
  // Symbol values, used when configurations are turned into marks.
  std::vector<double> alphabet;
  // Symmetric non-negative interaction, row-major |alphabet|^2.
  std::vector<double> psi;
  // Reference probabilities over the alphabet.
  std::vector<double> lambda;

  int q() const { return static_cast<int>(alphabet.size()); }
  double Psi(int a, int b) const { return psi[static_cast<std::size_t>(a) * q() + b]; }

  // Throws InvalidArgument on asymmetric/negative psi, a symbol whose psi
  // row is all zero, or lambda not summing to 1.
  void Validate() const;

  // psi(a, b) = exp(beta * a * b) on the alphabet {-1, +1}.
  static GibbsSpec Ising(double beta, double lambda_plus = 0.5);
  // psi == 1: the Gibbs measure is the product measure lambda^V.
  static GibbsSpec Independent(std::vector<double> alphabet,
                               std::vector<double> lambda);
  // {"alphabet":[...], "psi":[[...]], "lambda":[...]}
  static GibbsSpec FromJson(const std::string& text);
  std::string ToJson() const;
};

// prod_{edges} psi * prod_{vertices} lambda, accumulated in log space.
double UnnormalizedWeight(const Graph& g, const GibbsSpec& spec,
                          std::span<const int> config);

inline constexpr std::int64_t kExactStateCap = 10'000'000;
inline constexpr std::int64_t kKernelStateCap = 1'000'000;

// Configurations are enumerated in mixed radix, vertex 0 least significant.
struct ExactGibbs {
  int num_vertices = 0;
  int q = 0;
  double partition_function = 0.0;
  std::vector<double> probabilities;

  Configuration Decode(std::int64_t index) const;
  std::int64_t Encode(std::span<const int> config) const;
  // P(x_v = a) for every vertex and symbol, row-major |V| x q.
  std::vector<double> Marginals() const;
};

ExactGibbs ExactGibbsMeasure(const Graph& g, const GibbsSpec& spec,
                             std::int64_t state_cap = kExactStateCap);

// The boundary of A: vertices outside A adjacent to A, sorted.
std::vector<int> OuterBoundary(const Graph& g, std::span<const int> region);

// Law of x_A given the boundary values, with configurations of A enumerated
// in mixed radix over `region` in the given order.
struct KernelDistribution {
  std::vector<int> region;
  int q = 0;
  double normalizer = 0.0;
  std::vector<double> probabilities;

  Configuration Decode(std::int64_t index) const;
};

// `boundary` must assign a symbol to exactly the vertices of OuterBoundary.
KernelDistribution ConditionalKernel(const Graph& g, const GibbsSpec& spec,
                                     std::span<const int> region,
                                     const std::map<int, int>& boundary,
                                     std::int64_t state_cap = kKernelStateCap);

// Single-site conditional law of x_v given the rest of `config`.
std::vector<double> SingleSiteKernel(const Graph& g, const GibbsSpec& spec,
                                     std::span<const int> config, int v);

// Random-scan Glauber chain started from i.i.d. lambda. One sweep is |V|
// single-site updates at uniformly drawn sites. After burn_in sweeps, the
// observer is called with the configuration after each further sweep.
void GlauberChain(const Graph& g, const GibbsSpec& spec, std::int64_t burn_in,
                  std::int64_t sweeps, Seed seed,
                  const std::function<void(const Configuration&)>& observer);

// Configuration after burn_in + sweeps sweeps. burn_in < 0 selects the
// default of 10 * sweeps.
Configuration GlauberSample(const Graph& g, const GibbsSpec& spec,
                            std::int64_t sweeps, std::int64_t burn_in, Seed seed);

Configuration IidSample(const Graph& g, std::span<const double> lambda, Seed seed);
Configuration IidSample(int num_vertices, std::span<const double> lambda, Seed seed);

// Symbol values of a configuration as discrete marks.
Marks ConfigurationMarks(const GibbsSpec& spec, std::span<const int> config);

}  // namespace lwsim

#endif  // LWSIM_GIBBS_HPP_
