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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "lwsim/errors.hpp"

namespace lwsim {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double SafeLog(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

std::int64_t StateCount(int q, std::size_t sites, std::int64_t cap,
                        const char* what) {
  std::int64_t count = 1;
  for (std::size_t i = 0; i < sites; ++i) {
    if (count > cap / std::max(q, 1)) {
      throw SizeLimitError(std::string(what) + ": state space exceeds cap of " +
                           std::to_string(cap));
    }
    count *= q;
  }
  return count;
}

void DecodeInto(std::int64_t index, int q, std::span<int> out) {
  for (int& x : out) {
    x = static_cast<int>(index % q);
    index /= q;
  }
}

// Normalises exp(logw) in place and returns the normaliser.
double NormalizeLogWeights(std::vector<double>& logw) {
  const double top = *std::max_element(logw.begin(), logw.end());
  if (top == kNegInf) throw NumericalError("all configurations have zero weight", 0);
  double sum = 0.0;
  for (double& w : logw) {
    w = std::exp(w - top);
    sum += w;
  }
  for (double& w : logw) w /= sum;
  return sum * std::exp(top);
}

}  // namespace

void GibbsSpec::Validate() const {
  const int n = q();
  if (n < 1) throw InvalidArgument("Gibbs spec: empty alphabet");
  if (static_cast<int>(psi.size()) != n * n) {
    throw InvalidArgument("Gibbs spec: psi must be |alphabet| x |alphabet|");
  }
  if (static_cast<int>(lambda.size()) != n) {
    throw InvalidArgument("Gibbs spec: lambda must have |alphabet| entries");
  }
  for (int a = 0; a < n; ++a) {
    bool positive = false;
    for (int b = 0; b < n; ++b) {
      const double x = Psi(a, b);
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw InvalidArgument("Gibbs spec: psi entries must be finite and >= 0");
      }
      if (x != Psi(b, a)) throw InvalidArgument("Gibbs spec: psi not symmetric");
      positive = positive || x > 0.0;
    }
    if (!positive) throw InvalidArgument("Gibbs spec: psi row without positive entry");
  }
  double total = 0.0;
  for (double l : lambda) {
    if (!(l >= 0.0)) throw InvalidArgument("Gibbs spec: lambda entries must be >= 0");
    total += l;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("Gibbs spec: lambda must sum to 1");
  }
}

GibbsSpec GibbsSpec::Ising(double beta, double lambda_plus) {
  GibbsSpec s;
  s.alphabet = {-1.0, 1.0};
  s.psi = {std::exp(beta), std::exp(-beta), std::exp(-beta), std::exp(beta)};
  s.lambda = {1.0 - lambda_plus, lambda_plus};
  s.Validate();
  return s;
}

GibbsSpec GibbsSpec::Independent(std::vector<double> alphabet,
                                 std::vector<double> lambda) {
  GibbsSpec s;
  const std::size_t n = alphabet.size();
  s.alphabet = std::move(alphabet);
  s.psi.assign(n * n, 1.0);
  s.lambda = std::move(lambda);
  s.Validate();
  return s;
}

GibbsSpec GibbsSpec::FromJson(const std::string& text) {
  GibbsSpec s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.alphabet = j.at("alphabet").get<std::vector<double>>();
    const auto rows = j.at("psi").get<std::vector<std::vector<double>>>();
    for (const auto& row : rows) {
      if (row.size() != s.alphabet.size()) {
        throw InvalidArgument("Gibbs spec: psi row length mismatch");
      }
      s.psi.insert(s.psi.end(), row.begin(), row.end());
    }
    s.lambda = j.at("lambda").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("Gibbs spec JSON: ") + e.what());
  }
  s.Validate();
  return s;
}

std::string GibbsSpec::ToJson() const {
  nlohmann::json j;
  j["alphabet"] = alphabet;
  std::vector<std::vector<double>> rows;
  for (int a = 0; a < q(); ++a) {
    rows.emplace_back(psi.begin() + static_cast<std::ptrdiff_t>(a) * q(),
                      psi.begin() + static_cast<std::ptrdiff_t>(a + 1) * q());
  }
  j["psi"] = rows;
  j["lambda"] = lambda;
  return j.dump();
}

double UnnormalizedWeight(const Graph& g, const GibbsSpec& spec,
                          std::span<const int> config) {
  if (static_cast<int>(config.size()) != g.num_vertices()) {
    throw InvalidArgument("configuration length does not match vertex count");
  }
  double logw = 0.0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int a = config[v];
    if (a < 0 || a >= spec.q()) throw InvalidArgument("symbol outside alphabet");
    logw += SafeLog(spec.lambda[a]);
    for (int u : g.neighbors(v)) {
      if (u > v) logw += SafeLog(spec.Psi(a, config[u]));
    }
  }
  return std::exp(logw);
}

Configuration ExactGibbs::Decode(std::int64_t index) const {
  Configuration c(static_cast<std::size_t>(num_vertices));
  DecodeInto(index, q, c);
  return c;
}

std::int64_t ExactGibbs::Encode(std::span<const int> config) const {
  std::int64_t idx = 0;
  for (std::size_t i = config.size(); i-- > 0;) idx = idx * q + config[i];
  return idx;
}

std::vector<double> ExactGibbs::Marginals() const {
  std::vector<double> m(static_cast<std::size_t>(num_vertices) * q, 0.0);
  Configuration c(static_cast<std::size_t>(num_vertices));
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(probabilities.size()); ++i) {
    DecodeInto(i, q, c);
    for (int v = 0; v < num_vertices; ++v) {
      m[static_cast<std::size_t>(v) * q + c[v]] += probabilities[i];
    }
  }
  return m;
}

ExactGibbs ExactGibbsMeasure(const Graph& g, const GibbsSpec& spec,
                             std::int64_t state_cap) {
  spec.Validate();
  ExactGibbs out;
  out.num_vertices = g.num_vertices();
  out.q = spec.q();
  const std::int64_t states = StateCount(out.q, static_cast<std::size_t>(out.num_vertices),
                                         state_cap, "exact Gibbs");
  std::vector<double> logw(static_cast<std::size_t>(states));
  Configuration c(static_cast<std::size_t>(out.num_vertices));
  const auto edges = g.edges();
  for (std::int64_t i = 0; i < states; ++i) {
    DecodeInto(i, out.q, c);
    double lw = 0.0;
    for (int v = 0; v < out.num_vertices; ++v) lw += SafeLog(spec.lambda[c[v]]);
    for (const auto& [u, v] : edges) lw += SafeLog(spec.Psi(c[u], c[v]));
    logw[i] = lw;
  }
  out.partition_function = NormalizeLogWeights(logw);
  out.probabilities = std::move(logw);
  return out;
}

std::vector<int> OuterBoundary(const Graph& g, std::span<const int> region) {
  std::vector<char> in(static_cast<std::size_t>(g.num_vertices()), 0);
  for (int v : region) {
    if (v < 0 || v >= g.num_vertices()) throw InvalidArgument("region vertex out of range");
    if (in[v]) throw InvalidArgument("region lists a vertex twice");
    in[v] = 1;
  }
  std::vector<int> boundary;
  for (int v : region) {
    for (int u : g.neighbors(v)) {
      if (!in[u]) boundary.push_back(u);
    }
  }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  return boundary;
}

Configuration KernelDistribution::Decode(std::int64_t index) const {
  Configuration c(region.size());
  DecodeInto(index, q, c);
  return c;
}

KernelDistribution ConditionalKernel(const Graph& g, const GibbsSpec& spec,
                                     std::span<const int> region,
                                     const std::map<int, int>& boundary,
                                     std::int64_t state_cap) {
  spec.Validate();
  const auto expected = OuterBoundary(g, region);
  if (boundary.size() != expected.size() ||
      !std::equal(expected.begin(), expected.end(), boundary.begin(),
                  [](int v, const auto& kv) { return v == kv.first; })) {
    throw InvalidArgument("conditional kernel: boundary must cover exactly the "
                          "outer boundary of the region");
  }
  for (const auto& [v, a] : boundary) {
    if (a < 0 || a >= spec.q()) throw InvalidArgument("boundary symbol outside alphabet");
  }
  KernelDistribution out;
  out.region.assign(region.begin(), region.end());
  out.q = spec.q();
  const std::int64_t states =
      StateCount(out.q, region.size(), state_cap, "conditional kernel");
  std::unordered_map<int, int> pos;
  for (std::size_t i = 0; i < region.size(); ++i) pos[region[i]] = static_cast<int>(i);

  std::vector<double> logw(static_cast<std::size_t>(states));
  Configuration c(region.size());
  for (std::int64_t s = 0; s < states; ++s) {
    DecodeInto(s, out.q, c);
    double lw = 0.0;
    for (std::size_t i = 0; i < region.size(); ++i) {
      const int v = region[i];
      lw += SafeLog(spec.lambda[c[i]]);
      for (int u : g.neighbors(v)) {
        const auto it = pos.find(u);
        if (it != pos.end()) {
          if (it->second > static_cast<int>(i)) lw += SafeLog(spec.Psi(c[i], c[it->second]));
        } else {
          lw += SafeLog(spec.Psi(c[i], boundary.at(u)));
        }
      }
    }
    logw[s] = lw;
  }
  out.normalizer = NormalizeLogWeights(logw);
  out.probabilities = std::move(logw);
  return out;
}

std::vector<double> SingleSiteKernel(const Graph& g, const GibbsSpec& spec,
                                     std::span<const int> config, int v) {
  std::vector<double> logw(static_cast<std::size_t>(spec.q()));
  for (int a = 0; a < spec.q(); ++a) {
    double lw = SafeLog(spec.lambda[a]);
    for (int u : g.neighbors(v)) lw += SafeLog(spec.Psi(a, config[u]));
    logw[a] = lw;
  }
  NormalizeLogWeights(logw);
  return logw;
}

void GlauberChain(const Graph& g, const GibbsSpec& spec, std::int64_t burn_in,
                  std::int64_t sweeps, Seed seed,
                  const std::function<void(const Configuration&)>& observer) {
  spec.Validate();
  if (sweeps < 1) throw InvalidArgument("Glauber: sweeps must be >= 1");
  if (burn_in < 0) throw InvalidArgument("Glauber: burn_in must be >= 0");
  const int n = g.num_vertices();
  Configuration x = IidSample(g, spec.lambda, DeriveSeed(seed, 0));
  if (n == 0) return;
  CounterRng rng(DeriveSeed(seed, 1));
  std::vector<double> log_lambda(spec.lambda.size());
  std::transform(spec.lambda.begin(), spec.lambda.end(), log_lambda.begin(), SafeLog);
  std::vector<double> log_psi(spec.psi.size());
  std::transform(spec.psi.begin(), spec.psi.end(), log_psi.begin(), SafeLog);
  const int q = spec.q();
  std::vector<double> w(static_cast<std::size_t>(q));
  for (std::int64_t sweep = 0; sweep < burn_in + sweeps; ++sweep) {
    for (int step = 0; step < n; ++step) {
      const int v = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(n)));
      double top = kNegInf;
      for (int a = 0; a < q; ++a) {
        double lw = log_lambda[a];
        for (int u : g.neighbors(v)) lw += log_psi[static_cast<std::size_t>(a) * q + x[u]];
        w[a] = lw;
        top = std::max(top, lw);
      }
      double total = 0.0;
      for (double& e : w) {
        e = std::exp(e - top);
        total += e;
      }
      double u = rng.Uniform() * total;
      int pick = q - 1;
      for (int a = 0; a < q; ++a) {
        if (u < w[a]) {
          pick = a;
          break;
        }
        u -= w[a];
      }
      x[v] = pick;
    }
    if (sweep >= burn_in) observer(x);
  }
}

Configuration GlauberSample(const Graph& g, const GibbsSpec& spec,
                            std::int64_t sweeps, std::int64_t burn_in, Seed seed) {
  if (burn_in < 0) burn_in = 10 * sweeps;
  Configuration last;
  std::int64_t seen = 0;
  GlauberChain(g, spec, burn_in + sweeps - 1, 1, seed, [&](const Configuration& c) {
    last = c;
    ++seen;
  });
  if (seen == 0) last = IidSample(g, spec.lambda, DeriveSeed(seed, 0));
  return last;
}

Configuration IidSample(int num_vertices, std::span<const double> lambda, Seed seed) {
  if (lambda.empty()) throw InvalidArgument("iid sample: empty law");
  CounterRng rng(seed);
  Configuration c(static_cast<std::size_t>(num_vertices));
  for (int& x : c) {
    double u = rng.Uniform();
    int pick = static_cast<int>(lambda.size()) - 1;
    for (std::size_t a = 0; a < lambda.size(); ++a) {
      if (u < lambda[a]) {
        pick = static_cast<int>(a);
        break;
      }
      u -= lambda[a];
    }
    // Never land on a zero-probability symbol through rounding.
    while (pick > 0 && lambda[pick] == 0.0) --pick;
    x = pick;
  }
  return c;
}

Configuration IidSample(const Graph& g, std::span<const double> lambda, Seed seed) {
  return IidSample(g.num_vertices(), lambda, seed);
}

Marks ConfigurationMarks(const GibbsSpec& spec, std::span<const int> config) {
  Marks m;
  m.kind = MarkKind::kDiscrete;
  m.dim = 1;
  m.values.reserve(config.size());
  for (int a : config) m.values.push_back(spec.alphabet.at(a));
  return m;
}

}  // namespace lwsim
