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

// Offspring laws, Galton-Watson and unimodular Galton-Watson trees, and the
// supercritical/subcritical duality transform.
#ifndef LWSIM_LIMIT_TREES_HPP_
#define LWSIM_LIMIT_TREES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lwsim/graph.hpp"
#include "lwsim/random.hpp"

namespace lwsim {

inline constexpr double kDefaultTailTolerance = 1e-12;

// Law on {0, ..., k_max}. Infinite-support laws are truncated once the
// remaining tail mass drops below tail_tolerance, then renormalised.
class DegreeDist {
 public:
  DegreeDist() = default;
  explicit DegreeDist(std::vector<double> probabilities,
                      double tail_tolerance = kDefaultTailTolerance);

  static DegreeDist PointMass(int k);
  static DegreeDist Poisson(double mean,
                            double tail_tolerance = kDefaultTailTolerance);
  // Parses "poisson:2", "delta:3", "point:3" or "weights:0.2,0.2,0,0.6".
  static DegreeDist Parse(const std::string& spec);

  const std::vector<double>& probabilities() const { return p_; }
  double tail_tolerance() const { return tail_tolerance_; }
  int max_degree() const { return static_cast<int>(p_.size()) - 1; }
  double operator[](int k) const {
    return (k >= 0 && k < static_cast<int>(p_.size())) ? p_[k] : 0.0;
  }

  double Mean() const;
  double SecondMoment() const;
  // Probability generating function and its derivative.
  double Pgf(double s) const;
  double PgfDerivative(double s) const;

  // Inverse-CDF draw from a uniform in [0, 1).
  int Sample(double u) const;

 private:
  std::vector<double> p_{1.0};
  std::vector<double> cdf_{1.0};
  double tail_tolerance_ = kDefaultTailTolerance;
};

// rho_hat(k) = (k+1) rho(k+1) / mean.
DegreeDist SizeBiased(const DegreeDist& rho);

// sum k(k-1) rho_k / sum k rho_k, the mean of the size-biased law.
double Theta(const DegreeDist& rho);

struct TreeSample {
  RootedGraph tree;
  // Generation sizes, index 0 being the root generation.
  std::vector<int> generation_sizes;
  // The vertex budget was hit before the depth limit was reached.
  bool truncated = false;
};

inline constexpr int kUnlimitedDepth = -1;
inline constexpr std::int64_t kDefaultTreeBudget = 1'000'000;

// Galton-Watson tree: every vertex has offspring ~ `offspring`. Vertices at
// generation `depth` get no children (kUnlimitedDepth grows until extinction
// or the budget).
TreeSample SampleGw(const DegreeDist& offspring, int depth, Seed seed,
                    std::int64_t vertex_budget = kDefaultTreeBudget);

// Unimodular GW: root offspring ~ rho, later generations ~ SizeBiased(rho).
TreeSample SampleUgw(const DegreeDist& rho, int depth, Seed seed,
                     std::int64_t vertex_budget = kDefaultTreeBudget);

// UGW(rho) truncated at `depth`, conditioned on the untruncated tree being
// infinite. Each depth-`depth` vertex roots an independent GW(rho_hat) tree
// that dies out with probability q_hat, so a truncated draw is accepted with
// probability 1 - q_hat^(generation size at depth).
TreeSample SampleUgwSurviving(const DegreeDist& rho, int depth, Seed seed,
                              std::int64_t vertex_budget = kDefaultTreeBudget,
                              int max_rejections = 1'000'000);

struct SurvivalOptions {
  double tolerance = 1e-12;
  std::int64_t max_iterations = 100'000;
};

// Smallest fixed point in [0, 1] of the pgf of SizeBiased(rho).
double ExtinctionFixedPoint(const DegreeDist& rho, const SurvivalOptions& opts = {});

// P(UGW(rho) is infinite) = 1 - pgf_rho(q_hat); zero when Theta(rho) <= 1,
// except for rho = delta_2 (the bi-infinite path), where it is one.
double SurvivalProb(const DegreeDist& rho, const SurvivalOptions& opts = {});

// H(x) = m - 2x - sum_k k rho_k (1 - 2x/m)^(k/2) on [0, m/2].
double DualityH(const DegreeDist& rho, double x);

inline constexpr int kDualityGridPoints = 10'000;

// Smallest root of DualityH in (0, m/2] by grid scan plus bisection.
double DualAlpha(const DegreeDist& rho, int grid_points = kDualityGridPoints);

struct DualityReport {
  double m = 0.0;
  double theta = 0.0;
  double survival = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  DegreeDist dual;
  double dual_theta = 0.0;
  double dual_mass = 0.0;  // sum of the dual weights before any renormalising
};

// Full duality transform; throws NumericalError if the dual law does not
// normalise to 1 within 1e-8 or its theta exceeds 1 + 1e-8.
DualityReport DualDistribution(const DegreeDist& rho);

// The solution in (0, 1) of t e^-t = theta e^-theta, for theta > 1.
double PoissonDual(double theta);

// Total variation between two laws on the non-negative integers.
double DegreeTv(const DegreeDist& a, const DegreeDist& b);

}  // namespace lwsim

#endif  // LWSIM_LIMIT_TREES_HPP_
