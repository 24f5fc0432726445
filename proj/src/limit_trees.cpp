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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lwsim/errors.hpp"

namespace lwsim {
namespace {

std::vector<double> Trimmed(std::vector<double> p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  return p;
}

TreeSample GrowTree(const DegreeDist& root_law, const DegreeDist& later_law,
                    int depth, Seed seed, std::int64_t budget) {
  if (depth < kUnlimitedDepth) throw InvalidArgument("tree depth must be >= 0");
  if (budget < 1) throw InvalidArgument("tree vertex budget must be >= 1");
  CounterRng rng(seed);
  TreeSample out;
  std::vector<Edge> edges;
  std::vector<int> frontier{0};
  std::int64_t count = 1;
  out.generation_sizes.push_back(1);
  for (int gen = 0; depth == kUnlimitedDepth || gen < depth; ++gen) {
    const DegreeDist& law = gen == 0 ? root_law : later_law;
    std::vector<int> next;
    for (int parent : frontier) {
      int kids = law.Sample(rng.Uniform());
      if (count + kids > budget) {
        kids = static_cast<int>(budget - count);
        out.truncated = true;
      }
      for (int c = 0; c < kids; ++c) {
        const int child = static_cast<int>(count++);
        edges.emplace_back(parent, child);
        next.push_back(child);
      }
      if (out.truncated) break;
    }
    if (next.empty() && !out.truncated) break;
    out.generation_sizes.push_back(static_cast<int>(next.size()));
    frontier = std::move(next);
    if (out.truncated) break;
  }
  out.tree.graph = Graph::FromEdges(static_cast<int>(count), edges);
  out.tree.root = 0;
  out.tree.origin.resize(static_cast<std::size_t>(count));
  std::iota(out.tree.origin.begin(), out.tree.origin.end(), 0);
  return out;
}

}  // namespace

DegreeDist::DegreeDist(std::vector<double> probabilities, double tail_tolerance)
    : tail_tolerance_(tail_tolerance) {
  if (probabilities.empty()) throw InvalidArgument("degree law: empty");
  double sum = 0.0;
  for (double x : probabilities) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidArgument("degree law: entries must be finite and >= 0");
    }
    sum += x;
  }
  // Rounding alone can move a normalised sum by a few ulps.
  if (std::abs(sum - 1.0) > std::max(tail_tolerance, 1e-14)) {
    std::ostringstream os;
    os << "degree law: total mass " << sum << " not within " << tail_tolerance
       << " of 1";
    throw InvalidArgument(os.str());
  }
  p_ = Trimmed(std::move(probabilities));
  for (double& x : p_) x /= sum;
  cdf_.resize(p_.size());
  std::partial_sum(p_.begin(), p_.end(), cdf_.begin());
}

DegreeDist DegreeDist::PointMass(int k) {
  if (k < 0) throw InvalidArgument("point mass at negative degree");
  std::vector<double> p(static_cast<std::size_t>(k) + 1, 0.0);
  p[k] = 1.0;
  return DegreeDist(std::move(p));
}

DegreeDist DegreeDist::Poisson(double mean, double tail_tolerance) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw InvalidArgument("Poisson mean must be finite and >= 0");
  }
  std::vector<double> p;
  double term = std::exp(-mean);
  double mass = 0.0;
  for (int k = 0;; ++k) {
    if (k > 0) term *= mean / k;
    p.push_back(term);
    mass += term;
    // Beyond the mode the tail after k is at most term * r / (1 - r) with
    // r = mean / (k + 1).
    const double r = mean / (k + 1);
    if (r < 1.0 && term * r / (1.0 - r) < tail_tolerance) break;
    if (k > 100000) throw NumericalError("Poisson truncation did not terminate", k);
  }
  for (double& x : p) x /= mass;
  return DegreeDist(std::move(p), tail_tolerance);
}

DegreeDist DegreeDist::Parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("degree law spec '" + spec + "' lacks ':'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  try {
    if (kind == "poisson") return Poisson(std::stod(rest));
    if (kind == "delta" || kind == "point") return PointMass(std::stoi(rest));
    if (kind == "weights") {
      std::vector<double> w;
      std::stringstream ss(rest);
      std::string item;
      while (std::getline(ss, item, ',')) w.push_back(std::stod(item));
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      if (!(total > 0.0)) throw InvalidArgument("weights must have positive sum");
      for (double& x : w) x /= total;
      return DegreeDist(std::move(w));
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidArgument*>(&e) != nullptr) throw;
    throw InvalidArgument("degree law spec '" + spec + "': bad number");
  }
  throw InvalidArgument("unknown degree law kind '" + kind + "'");
}

double DegreeDist::Mean() const {
  double m = 0.0;
  for (std::size_t k = 1; k < p_.size(); ++k) m += static_cast<double>(k) * p_[k];
  return m;
}

double DegreeDist::SecondMoment() const {
  double m = 0.0;
  for (std::size_t k = 1; k < p_.size(); ++k) {
    m += static_cast<double>(k) * static_cast<double>(k) * p_[k];
  }
  return m;
}

double DegreeDist::Pgf(double s) const {
  double acc = 0.0;
  for (auto it = p_.rbegin(); it != p_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double DegreeDist::PgfDerivative(double s) const {
  double acc = 0.0;
  for (std::size_t k = p_.size() - 1; k >= 1; --k) {
    acc = acc * s + static_cast<double>(k) * p_[k];
  }
  return acc;
}

int DegreeDist::Sample(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return max_degree();
  return static_cast<int>(it - cdf_.begin());
}

DegreeDist SizeBiased(const DegreeDist& rho) {
  const double m = rho.Mean();
  if (!(m > 0.0)) throw InvalidArgument("size-biasing requires a positive mean");
  const auto& p = rho.probabilities();
  std::vector<double> q(p.size() > 1 ? p.size() - 1 : 1, 0.0);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    q[k] = static_cast<double>(k + 1) * p[k + 1] / m;
  }
  return DegreeDist(std::move(q), std::max(rho.tail_tolerance(), 1e-12));
}

double Theta(const DegreeDist& rho) {
  const double m = rho.Mean();
  if (!(m > 0.0)) throw InvalidArgument("theta requires a positive mean");
  double f = 0.0;
  const auto& p = rho.probabilities();
  for (std::size_t k = 2; k < p.size(); ++k) {
    f += static_cast<double>(k) * static_cast<double>(k - 1) * p[k];
  }
  return f / m;
}

TreeSample SampleGw(const DegreeDist& offspring, int depth, Seed seed,
                    std::int64_t vertex_budget) {
  return GrowTree(offspring, offspring, depth, seed, vertex_budget);
}

TreeSample SampleUgw(const DegreeDist& rho, int depth, Seed seed,
                     std::int64_t vertex_budget) {
  if (rho.Mean() > 0.0) {
    return GrowTree(rho, SizeBiased(rho), depth, seed, vertex_budget);
  }
  return GrowTree(rho, rho, depth, seed, vertex_budget);
}

TreeSample SampleUgwSurviving(const DegreeDist& rho, int depth, Seed seed,
                              std::int64_t vertex_budget, int max_rejections) {
  if (depth < 0) throw InvalidArgument("surviving tree needs a finite depth");
  const double s = SurvivalProb(rho);
  if (!(s > 0.0)) throw InvalidArgument("survival probability is zero");
  const DegreeDist hat = SizeBiased(rho);
  const double q_hat = ExtinctionFixedPoint(rho);
  for (int attempt = 0; attempt < max_rejections; ++attempt) {
    TreeSample t = GrowTree(rho, hat, depth, DeriveSeed(seed, attempt), vertex_budget);
    double accept = 0.0;
    if (t.truncated) {
      accept = 1.0;
    } else if (depth == 0) {
      accept = s;
    } else {
      const int z = static_cast<int>(t.generation_sizes.size()) > depth
                        ? t.generation_sizes[depth]
                        : 0;
      accept = 1.0 - std::pow(q_hat, z);
    }
    CounterRng coin(DeriveSeed(seed, attempt, 1));
    if (coin.Uniform() < accept) return t;
  }
  throw NumericalError("surviving tree: rejection budget exhausted", max_rejections);
}

double ExtinctionFixedPoint(const DegreeDist& rho, const SurvivalOptions& opts) {
  const DegreeDist hat = SizeBiased(rho);
  // hat = delta_1: every vertex past the root has exactly one child.
  if (hat[1] == 1.0) return 0.0;
  if (Theta(rho) <= 1.0) return 1.0;
  double q = 0.0;
  for (std::int64_t it = 1; it <= opts.max_iterations; ++it) {
    const double next = hat.Pgf(q);
    if (std::abs(next - q) < opts.tolerance) return next;
    q = next;
  }
  throw NumericalError("extinction fixed point did not converge",
                       opts.max_iterations);
}

double SurvivalProb(const DegreeDist& rho, const SurvivalOptions& opts) {
  if (!(rho.Mean() > 0.0)) return 0.0;
  const double q = ExtinctionFixedPoint(rho, opts);
  if (q == 1.0) return 0.0;
  return std::clamp(1.0 - rho.Pgf(q), 0.0, 1.0);
}

double DualityH(const DegreeDist& rho, double x) {
  const double m = rho.Mean();
  const double y = std::max(0.0, 1.0 - 2.0 * x / m);
  const double root_y = std::sqrt(y);
  const auto& p = rho.probabilities();
  double sum = 0.0;
  for (std::size_t k = p.size() - 1; k >= 1; --k) {
    sum = sum * root_y + static_cast<double>(k) * p[k];
  }
  // sum now holds sum_k k p_k root_y^(k-1).
  return m - 2.0 * x - sum * root_y;
}

double DualAlpha(const DegreeDist& rho, int grid_points) {
  if (grid_points < 2) throw InvalidArgument("duality grid needs >= 2 points");
  const double m = rho.Mean();
  if (!(m > 0.0) || Theta(rho) <= 1.0) {
    throw InvalidArgument("dual_alpha requires a supercritical law (theta > 1)");
  }
  const double half = m / 2.0;
  const double h = half / grid_points;
  auto bisect = [&](auto&& f, double lo, double hi) {
    double flo = f(lo);
    // Run to full double precision: the dual law inherits every bit of error.
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = f(mid);
      if (fm == 0.0) return mid;
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  auto H = [&](double x) { return DualityH(rho, x); };
  double prev = H(h);
  if (prev == 0.0) return h;
  // Interior cells; the endpoint m/2 is always a root and is excluded here.
  for (int i = 2; i < grid_points; ++i) {
    const double x = i * h;
    const double cur = H(x);
    if (cur == 0.0) return x;
    if ((cur > 0.0) != (prev > 0.0)) return bisect(H, x - h, x);
    prev = cur;
  }
  // The last cell (x_{N-1}, m/2) maps to beta in (0, beta_{N-1}); scan it on a
  // geometric grid in beta, where roots close to m/2 are resolvable.
  auto x_of_beta = [&](double b) { return half * (1.0 - b * b); };
  auto h_beta = [&](double b) { return H(x_of_beta(b)); };
  double b_prev = std::sqrt(std::max(0.0, 1.0 - 2.0 * (half - h) / m));
  double f_prev = h_beta(b_prev);
  for (int j = 1; j <= 3000; ++j) {
    const double b = b_prev * 0.97;
    if (b < 1e-150) break;
    const double f = h_beta(b);
    if (f == 0.0) return x_of_beta(b);
    if ((f > 0.0) != (f_prev > 0.0)) {
      const double beta_root = bisect(h_beta, b, b_prev);
      return x_of_beta(beta_root);
    }
    b_prev = b;
    f_prev = f;
  }
  return half;
}

DualityReport DualDistribution(const DegreeDist& rho) {
  DualityReport r;
  r.m = rho.Mean();
  if (!(r.m > 0.0)) throw InvalidArgument("duality requires a positive mean");
  r.theta = Theta(rho);
  if (r.theta <= 1.0) {
    throw InvalidArgument("duality requires a supercritical law (theta > 1)");
  }
  r.survival = SurvivalProb(rho);
  if (r.survival >= 1.0 - 1e-15) {
    throw InvalidArgument("duality undefined: survival probability is 1");
  }
  r.alpha = DualAlpha(rho);
  r.beta = std::sqrt(std::max(0.0, 1.0 - 2.0 * r.alpha / r.m));
  const auto& p = rho.probabilities();
  std::vector<double> w(p.size());
  double power = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    w[k] = p[k] * power / (1.0 - r.survival);
    power *= r.beta;
  }
  r.dual_mass = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(r.dual_mass - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "dual law does not normalise: mass " << r.dual_mass;
    throw NumericalError(os.str(), 0);
  }
  r.dual = DegreeDist(std::move(w), 1e-8);
  r.dual_theta = r.dual.Mean() > 0.0 ? Theta(r.dual) : 0.0;
  if (r.dual_theta > 1.0 + 1e-8) {
    std::ostringstream os;
    os << "dual law is supercritical: theta " << r.dual_theta;
    throw NumericalError(os.str(), 0);
  }
  return r;
}

double PoissonDual(double theta) {
  if (!(theta > 1.0) || !std::isfinite(theta)) {
    throw InvalidArgument("poisson_dual requires theta > 1");
  }
  // Solve g(t) = log t - t = log theta - theta on (0, 1), where g increases.
  const double target = std::log(theta) - theta;
  auto g = [&](double t) { return std::log(t) - t - target; };
  double lo = 0.0;
  double hi = 1.0;
  // theta e^-theta lies below the root because the root t satisfies
  // t = theta e^-theta e^t with t > 0.
  double t = theta * std::exp(-theta);
  for (int it = 0; it < 200; ++it) {
    const double f = g(t);
    if (f == 0.0) return t;
    if (f < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = t - f / (1.0 / t - 1.0);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * next) {
      return next;
    }
    t = next;
  }
  throw NumericalError("poisson_dual did not converge", 200);
}

double DegreeTv(const DegreeDist& a, const DegreeDist& b) {
  const int top = std::max(a.max_degree(), b.max_degree());
  double s = 0.0;
  for (int k = 0; k <= top; ++k) s += std::abs(a[k] - b[k]);
  return 0.5 * s;
}

}  // namespace lwsim
