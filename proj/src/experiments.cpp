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

#include "lwsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "lwsim/gibbs.hpp"
#include "lwsim/local_topology.hpp"
#include "lwsim/parallel.hpp"
#include "lwsim/stats.hpp"

namespace lwsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Poisson laws in the duality checks are truncated where the tail drops
// below double resolution, so truncation does not mask the identities.
constexpr double kDualityTail = 1e-17;

// Pass/fail bookkeeping for one run.
class Checks {
 public:
  void Add(const std::string& name, double value, const std::string& relation,
           double threshold, bool ok) {
    list_.push_back({{"name", name},
                     {"value", value},
                     {"relation", relation},
                     {"threshold", threshold},
                     {"pass", ok}});
    pass_ = pass_ && ok;
  }
  void AddFlag(const std::string& name, bool ok) {
    list_.push_back({{"name", name}, {"pass", ok}});
    pass_ = pass_ && ok;
  }
  bool pass() const { return pass_; }
  const Json& list() const { return list_; }

 private:
  Json list_ = Json::array();
  bool pass_ = true;
};

ExperimentResult Finish(const std::string& name, const Json& config,
                        const RunContext& ctx, const Checks& checks,
                        Json metrics, std::vector<CsvTable> tables) {
  ExperimentResult r;
  r.pass = checks.pass();
  r.summary = {{"experiment", name},
               {"seed", ctx.seed},
               {"config", config},
               {"metrics", std::move(metrics)},
               {"checks", checks.list()},
               {"pass", r.pass}};
  r.tables = std::move(tables);
  return r;
}

bool StrictlyDecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

const DiscreteModel& RequireDiscrete(const Model& m, const std::string& experiment) {
  const auto* dm = std::get_if<DiscreteModel>(&m);
  if (dm == nullptr) {
    throw ConfigError("model", experiment + " needs a discrete-time model");
  }
  return *dm;
}

bool IsDiscrete(const Model& m) { return std::holds_alternative<DiscreteModel>(m); }

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

Json Prepare(const std::string& experiment, const Json& user) {
  if (!user.is_null() && !user.is_object()) {
    throw ConfigError("", "configuration must be a JSON object");
  }
  return MergeConfig(DefaultConfig(experiment), user.is_null() ? Json::object() : user);
}

}  // namespace

// ---------------------------------------------------------------------------

ConfigSection::ConfigSection(const Json& j, std::string path)
    : json_(&j), path_(std::move(path)) {
  if (!j.is_object()) Fail("", "expected an object");
}

void ConfigSection::Fail(const std::string& key, const std::string& what) const {
  std::string where = path_;
  if (!key.empty()) where += where.empty() ? key : "." + key;
  throw ConfigError(key, (where.empty() ? std::string("config") : where) + ": " + what);
}

bool ConfigSection::Has(const std::string& key) const {
  used_.insert(key);
  return json_->contains(key) && !(*json_)[key].is_null();
}

const Json& ConfigSection::At(const std::string& key) const {
  used_.insert(key);
  if (!json_->contains(key)) Fail(key, "missing required key");
  return (*json_)[key];
}

const Json& ConfigSection::Raw(const std::string& key) const { return At(key); }

double ConfigSection::Number(const std::string& key) const {
  const Json& v = At(key);
  if (!v.is_number()) Fail(key, "expected a number");
  return v.get<double>();
}

double ConfigSection::Number(const std::string& key, double fallback) const {
  return Has(key) ? Number(key) : fallback;
}

std::int64_t ConfigSection::Integer(const std::string& key) const {
  const Json& v = At(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  Fail(key, "expected an integer");
}

std::int64_t ConfigSection::Integer(const std::string& key, std::int64_t fallback) const {
  return Has(key) ? Integer(key) : fallback;
}

std::string ConfigSection::String(const std::string& key) const {
  const Json& v = At(key);
  if (!v.is_string()) Fail(key, "expected a string");
  return v.get<std::string>();
}

std::string ConfigSection::String(const std::string& key,
                                  const std::string& fallback) const {
  return Has(key) ? String(key) : fallback;
}

std::vector<double> ConfigSection::Numbers(const std::string& key) const {
  const Json& v = At(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) Fail(key, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) Fail(key, "expected a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> ConfigSection::Integers(const std::string& key) const {
  std::vector<int> out;
  for (double d : Numbers(key)) {
    if (std::floor(d) != d || std::abs(d) > 2e9) Fail(key, "expected integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

ConfigSection ConfigSection::Child(const std::string& key) const {
  const Json& v = At(key);
  if (!v.is_object()) Fail(key, "expected an object");
  return ConfigSection(v, path_.empty() ? key : path_ + "." + key);
}

ConfigSection ConfigSection::ChildOrEmpty(const std::string& key) const {
  static const Json kEmpty = Json::object();
  if (!Has(key)) return ConfigSection(kEmpty, path_.empty() ? key : path_ + "." + key);
  return Child(key);
}

void ConfigSection::Finish() const {
  for (const auto& [key, value] : json_->items()) {
    if (!used_.contains(key)) Fail(key, "unknown key");
  }
}

Json MergeConfig(const Json& defaults, const Json& user) {
  static const std::set<std::string> kReplace = {"graph", "model", "init", "horizon", "ising"};
  Json out = defaults;
  for (const auto& [key, value] : user.items()) {
    if (value.is_null()) {
      out.erase(key);
    } else if (value.is_object() && out.contains(key) && out[key].is_object() &&
               !kReplace.contains(key)) {
      out[key] = MergeConfig(out[key], value);
    } else {
      out[key] = value;
    }
  }
  return out;
}

void WriteCsv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << FormatDouble(row[i]);
    out << "\n";
  }
}

// ---------------------------------------------------------------------------

Graph GraphFamily::Make(int n, Seed seed) const {
  if (n < 1) throw ConfigError("sizes", "graph size must be >= 1");
  if (type == "er") return GenErdosRenyi(n, fixed_p ? p : std::min(1.0, c / n), seed);
  if (type == "gnm") return GenGnm(n, m, seed);
  if (type == "regular") return GenRandomRegular(n, k, seed).graph;
  if (type == "config") {
    CounterRng rng(DeriveSeed(seed, 0));
    std::vector<int> degrees(static_cast<std::size_t>(n));
    std::int64_t sum = 0;
    for (int& d : degrees) {
      d = std::min(rho.Sample(rng.Uniform()), n - 1);
      sum += d;
    }
    if (sum % 2 == 1) degrees.back() += degrees.back() < n - 1 ? 1 : -1;
    return GenConfigurationModel(degrees, DeriveSeed(seed, 1)).graph;
  }
  throw ConfigError("type", "unknown graph family '" + type + "'");
}

DegreeDist GraphFamily::LimitLaw(int n) const {
  if (type == "er") return DegreeDist::Poisson(fixed_p ? p * (n - 1) : c);
  if (type == "gnm") return DegreeDist::Poisson(2.0 * static_cast<double>(m) / n);
  if (type == "regular") return DegreeDist::PointMass(k);
  return rho;
}

GraphFamily ParseGraphFamily(const ConfigSection& s) {
  GraphFamily f;
  f.type = s.String("type");
  if (f.type == "er") {
    if (s.Has("p")) {
      f.fixed_p = true;
      f.p = s.Number("p");
      if (!(f.p >= 0.0 && f.p <= 1.0)) throw ConfigError("p", s.path() + ".p: must lie in [0, 1]");
    } else {
      f.c = s.Number("c");
      if (!(f.c >= 0.0)) throw ConfigError("c", s.path() + ".c: must be >= 0");
    }
  } else if (f.type == "gnm") {
    f.m = s.Integer("m");
  } else if (f.type == "regular") {
    f.k = static_cast<int>(s.Integer("k"));
  } else if (f.type == "config") {
    try {
      f.rho = DegreeDist::Parse(s.String("rho"));
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ConfigError("rho", s.path() + ".rho: " + e.what());
    }
  } else {
    throw ConfigError("type", s.path() + ".type: unknown graph family '" + f.type + "'");
  }
  s.Finish();
  return f;
}

Model ParseModel(const ConfigSection& s) {
  const std::string name = s.String("name");
  ModelParams params;
  if (s.Has("params")) {
    const ConfigSection p = s.Child("params");
    for (const auto& [key, value] : s.Raw("params").items()) params[key] = p.Number(key);
    p.Finish();
  }
  s.Finish();
  static const std::map<std::string, std::set<std::string>> kKeys = {
      {"voter", {}},
      {"noisy_majority", {"epsilon"}},
      {"consensus_sde", {"sigma", "dim"}},
      {"kuramoto", {"K", "sigma"}}};
  const auto it = kKeys.find(name);
  if (it == kKeys.end()) throw ConfigError("name", s.path() + ".name: unknown model '" + name + "'");
  for (const auto& [key, value] : params) {
    if (!it->second.contains(key)) {
      throw ConfigError(key, s.path() + ".params." + key + ": not a parameter of " + name);
    }
  }
  try {
    return BuiltinModel(name, params);
  } catch (const InvalidArgument& e) {
    throw ConfigError("params", s.path() + ": " + e.what());
  }
}

Horizon ParseHorizon(const ConfigSection& s, const Model& model) {
  Horizon h;
  if (IsDiscrete(model)) {
    const auto k = s.Integer("k");
    if (k < 0) throw ConfigError("k", s.path() + ".k: must be >= 0");
    h = Horizon::Discrete(static_cast<int>(k));
  } else {
    const double t = s.Number("t");
    const double dt = s.Number("dt");
    try {
      h = Horizon::Continuous(t, dt);
    } catch (const InvalidArgument& e) {
      throw ConfigError("dt", s.path() + ": " + e.what());
    }
  }
  s.Finish();
  return h;
}

InitSampler ParseInit(const ConfigSection& s, const Model& model) {
  const std::string type = s.String("type");
  const int model_dim = IsDiscrete(model) ? 1 : std::get<DiffusionModel>(model).dim;
  InitSampler init;
  if (type == "bernoulli") {
    if (!IsDiscrete(model)) throw ConfigError("type", s.path() + ".type: bernoulli marks need a discrete model");
    const double p = s.Number("p");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p", s.path() + ".p: must lie in [0, 1]");
    init = IidBernoulliInit(p);
  } else if (type == "gaussian") {
    if (IsDiscrete(model)) throw ConfigError("type", s.path() + ".type: gaussian marks need a diffusion");
    const double sd = s.Number("sd", 1.0);
    const double clamp = s.Number("clamp", 3.0);
    if (!(sd >= 0.0) || !(clamp > 0.0)) throw ConfigError("sd", s.path() + ": sd must be >= 0 and clamp > 0");
    init = IidGaussianInit(model_dim, s.Number("mean", 0.0), sd, clamp);
  } else if (type == "constant") {
    init = ConstantValueInit(IsDiscrete(model) ? MarkKind::kDiscrete : MarkKind::kVector,
                             model_dim, s.Number("value", 0.0));
  } else if (type == "gibbs") {
    if (!IsDiscrete(model)) throw ConfigError("type", s.path() + ".type: gibbs marks need a discrete model");
    const ConfigSection is = s.Child("ising");
    const GibbsSpec spec = GibbsSpec::Ising(is.Number("beta"), is.Number("lambda_plus", 0.5));
    is.Finish();
    // The voter and majority rules read {0, 1}; map the Ising spins there.
    GibbsSpec binary = spec;
    binary.alphabet = {0.0, 1.0};
    const auto sweeps = s.Integer("sweeps", 50);
    if (sweeps < 1) throw ConfigError("sweeps", s.path() + ".sweeps: must be >= 1");
    init = [binary, sweeps](const Graph& g, Seed seed) {
      return ConfigurationMarks(binary, GlauberSample(g, binary, sweeps, -1, seed));
    };
  } else {
    throw ConfigError("type", s.path() + ".type: unknown initial condition '" + type + "'");
  }
  s.Finish();
  return init;
}

// ---------------------------------------------------------------------------

Json DefaultConfig(const std::string& experiment) {
  const Json voter = {{"name", "voter"}, {"params", Json::object()}};
  const Json fair = {{"type", "bernoulli"}, {"p", 0.5}};
  if (experiment == "graph-gen") {
    return {{"graph", {{"type", "er"}, {"n", 1000}, {"c", 2.0}}}};
  }
  if (experiment == "duality") {
    return {{"theta", {1.5, 2.0, 3.0}},
            {"rho", Json::array()},
            {"identity_tol", 1e-12},
            {"tv_tol", 1e-8},
            {"beta_tol", 1e-8}};
  }
  if (experiment == "lwc-test") {
    return {{"graph", {{"type", "er"}, {"c", 2.0}}},
            {"sizes", {300, 1000, 3000, 10000}},
            {"radius", 2},
            {"limit_samples", 100000},
            {"min_graph_samples", 100000},
            {"tv_tol", 0.05}};
  }
  if (experiment == "emp-test") {
    return {{"graph", {{"type", "er"}, {"c", 1.5}}},
            {"sizes", {300, 1000, 3000, 10000}},
            {"model", voter},
            {"init", fair},
            {"horizon", {{"k", 4}}},
            {"tree_depth", -1},
            {"limit_replicas", 100000},
            {"tv_tol", 0.05},
            {"w1_tol", 0.1},
            {"w1_samples", kDefaultW1Samples}};
  }
  if (experiment == "comp-emp-test") {
    return {{"model", voter},
            {"init", fair},
            {"horizon", {{"k", 4}}},
            {"tree_depth", -1},
            {"giant", {{"n", 20000}, {"theta", 2.0}, {"replicas", 10}, {"tol", 0.02}}},
            {"subcritical",
             {{"n", 10000}, {"theta", 0.5}, {"root_draws", 2000}, {"tree_draws", 20000},
              {"ks_tol", 0.05}}},
            {"supercritical",
             {{"n", 10000}, {"theta", 2.0}, {"root_draws", 2000}, {"pool_graphs", 5},
              {"limit_replicas", 100000}, {"giant_tol", 0.03}, {"tv_tol", 0.07},
              {"w1_tol", 0.1}}}};
  }
  if (experiment == "corr-decay") {
    return {{"mode", "discrete"},
            {"discrete",
             {{"dim", 2}, {"n", 10}, {"model", voter}, {"init", fair},
              {"locality_pairs", 50}, {"max_k", 4}, {"covariance_k", 3},
              {"distances", {2, 4, 6, 8, 10}}, {"replicas", 2000}, {"z", kDefaultCiZ}}},
            {"diffusion",
             {{"n", 40}, {"anchor", 15},
              {"model", {{"name", "consensus_sde"}, {"params", {{"sigma", 1.0}}}}},
              {"init", {{"type", "constant"}, {"value", 0.0}}},
              {"horizon", {{"t", 1.0}, {"dt", 1e-3}}},
              {"distances", {2, 4, 6, 8, 10}}, {"replicas", 10000},
              {"envelope_from", 6}, {"z", kDefaultCiZ}}}};
  }
  if (experiment == "tree-counterexample") {
    return {{"d", 3},
            {"height", 12},
            {"model", voter},
            {"init", fair},
            {"horizon", {{"k", 3}}},
            {"limit_replicas", 100000},
            {"canopy_max_level", 10},
            {"regular_min_tv", 0.1},
            {"canopy_tol", 0.05}};
  }
  if (experiment == "lattice-test") {
    return {{"dim", 2},
            {"sizes", {4, 8, 16, 32}},
            {"model", voter},
            {"init", fair},
            {"horizon", {{"k", 3}}},
            {"limit_replicas", 100000},
            {"tv_tol", 0.05}};
  }
  if (experiment == "ergodicity") {
    return {{"dim", 2},
            {"n", 32},
            {"model", voter},
            {"init", fair},
            {"horizon", {{"k", 5}}},
            {"functional", "agreement"},
            {"window", 2},
            {"box_sizes", {4, 8, 16, 32}},
            {"replicas", 50},
            {"slope_min", -1.3},
            {"slope_max", -0.7}};
  }
  if (experiment == "gibbs-check") {
    return {{"grid_half_width", 1},
            {"beta", 0.4},
            {"lambda_plus", 0.5},
            {"burn_in", 1000},
            {"sweeps", 1000000},
            {"marginal_tol", 0.01},
            {"small_graphs", 5},
            {"exact_tol", 1e-12}};
  }
  if (experiment == "integrator-check") {
    return {{"dts", {1e-2, 5e-3, 2.5e-3}}, {"t", 1.0}, {"x0", {1.0, 0.0}}, {"error_factor", 5.0}};
  }
  throw ConfigError("", "unknown experiment '" + experiment + "'");
}

// ---------------------------------------------------------------------------

GraphGenResult RunGraphGen(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("graph-gen", user);
  const ConfigSection top(config, "");
  const ConfigSection s = top.Child("graph");
  top.Finish();
  const std::string type = s.String("type");
  GraphGenResult out;
  Json metrics;
  auto size = [&](const char* key) {
    const auto v = s.Integer(key);
    if (v < 0 || v > kDefaultVertexCap) throw ConfigError(key, std::string("graph.") + key + ": out of range");
    return static_cast<int>(v);
  };
  if (type == "er" || type == "gnm" || type == "regular" || type == "config") {
    const int n = size("n");
    Json family = {{"type", type}};
    for (const char* key : {"p", "c", "m", "k", "rho"}) {
      if (s.Has(key)) family[key] = s.Raw(key);
    }
    const GraphFamily f = ParseGraphFamily(ConfigSection(family, "graph"));
    if (type == "config") {
      CounterRng rng(DeriveSeed(ctx.seed, 0));
      std::vector<int> degrees(static_cast<std::size_t>(n));
      std::int64_t sum = 0;
      for (int& d : degrees) {
        d = std::min(f.rho.Sample(rng.Uniform()), std::max(n - 1, 0));
        sum += d;
      }
      if (sum % 2 == 1) degrees.back() += degrees.back() < n - 1 ? 1 : -1;
      auto cm = GenConfigurationModel(degrees, DeriveSeed(ctx.seed, 1));
      out.graph = std::move(cm.graph);
      metrics["erased_edges"] = cm.erased;
      metrics["pairing_attempts"] = cm.attempts;
    } else {
      out.graph = f.Make(n, ctx.seed);
    }
  } else if (type == "lattice") {
    const auto rg = GenLatticeBox(size("dim"), size("n"));
    out.graph = rg.graph;
    out.root = rg.root;
  } else if (type == "regular_tree") {
    const auto rg = GenRegularTree(size("k"), size("height"));
    out.graph = rg.graph;
    out.root = rg.root;
  } else if (type == "canopy") {
    const auto ct = GenCanopyTruncation(size("d"), size("levels"),
                                        static_cast<int>(s.Integer("base_width", 1)),
                                        static_cast<int>(s.Integer("root_level", 0)));
    out.graph = ct.rooted.graph;
    out.root = ct.rooted.root;
  } else if (type == "ugw" || type == "gw") {
    DegreeDist rho;
    try {
      rho = DegreeDist::Parse(s.String("rho"));
    } catch (const InvalidArgument& e) {
      throw ConfigError("rho", std::string("graph.rho: ") + e.what());
    }
    const int depth = static_cast<int>(s.Integer("depth", kUnlimitedDepth));
    auto t = type == "ugw" ? SampleUgw(rho, depth, ctx.seed) : SampleGw(rho, depth, ctx.seed);
    out.graph = t.tree.graph;
    out.root = t.tree.root;
    metrics["truncated"] = t.truncated;
  } else if (type == "path" || type == "cycle") {
    const int n = size("n");
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    if (type == "cycle" && n >= 3) edges.emplace_back(0, n - 1);
    out.graph = Graph::FromEdges(n, edges);
  } else {
    throw ConfigError("type", "graph.type: unknown graph type '" + type + "'");
  }
  s.Finish();

  const Graph& g = out.graph;
  const auto labels = ComponentLabels(g);
  int components = 0, largest = 0, max_degree = 0;
  if (!labels.empty()) {
    components = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<int> sizes(static_cast<std::size_t>(components));
    for (int l : labels) ++sizes[l];
    largest = *std::max_element(sizes.begin(), sizes.end());
  }
  CsvTable degrees{"degree_histogram", {"degree", "count"}, {}};
  std::vector<std::int64_t> hist;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int d = g.degree(v);
    max_degree = std::max(max_degree, d);
    if (static_cast<int>(hist.size()) <= d) hist.resize(static_cast<std::size_t>(d) + 1);
    ++hist[d];
  }
  for (std::size_t d = 0; d < hist.size(); ++d) {
    degrees.rows.push_back({static_cast<double>(d), static_cast<double>(hist[d])});
  }
  metrics["vertices"] = g.num_vertices();
  metrics["edges"] = g.num_edges();
  metrics["components"] = components;
  metrics["largest_component"] = largest;
  metrics["max_degree"] = max_degree;
  metrics["mean_degree"] = g.num_vertices() ? 2.0 * g.num_edges() / g.num_vertices() : 0.0;
  metrics["root"] = out.root ? Json(*out.root) : Json(nullptr);
  out.result = Finish("graph-gen", config, ctx, Checks{}, std::move(metrics), {degrees});
  return out;
}

ExperimentResult RunDuality(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("duality", user);
  const ConfigSection s(config, "");
  const auto thetas = s.Numbers("theta");
  std::vector<std::string> rhos;
  for (const auto& r : s.Raw("rho").is_string() ? Json::array({s.Raw("rho")}) : s.Raw("rho")) {
    if (!r.is_string()) throw ConfigError("rho", "rho: expected law specs such as \"poisson:2\"");
    rhos.push_back(r.get<std::string>());
  }
  const double identity_tol = s.Number("identity_tol");
  const double tv_tol = s.Number("tv_tol");
  const double beta_tol = s.Number("beta_tol");
  s.Finish();
  if (thetas.empty() && rhos.empty()) throw ConfigError("theta", "theta: nothing to compute");

  struct Case {
    std::string spec;
    DegreeDist rho;
    bool poisson = false;
    double theta = 0.0;
  };
  std::vector<Case> cases;
  for (double t : thetas) {
    if (!(t > 1.0)) throw ConfigError("theta", "theta: duality needs theta > 1");
    std::ostringstream os;
    os << "poisson:" << std::setprecision(17) << t;
    cases.push_back({os.str(), DegreeDist::Poisson(t, kDualityTail), true, t});
  }
  for (const auto& r : rhos) {
    Case c;
    c.spec = r;
    try {
      c.rho = DegreeDist::Parse(r);
    } catch (const InvalidArgument& e) {
      throw ConfigError("rho", std::string("rho: ") + e.what());
    }
    if (r.rfind("poisson:", 0) == 0) {
      c.poisson = true;
      c.theta = std::stod(r.substr(8));
    }
    cases.push_back(std::move(c));
  }

  Checks checks;
  Json out = Json::array();
  std::vector<CsvTable> tables;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
    DualityReport rep;
    try {
      rep = DualDistribution(c.rho);
    } catch (const NumericalError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ConfigError(c.poisson && i < thetas.size() ? "theta" : "rho",
                        c.spec + ": " + e.what());
    }
    Json j = {{"rho", c.spec},          {"m", rep.m},
              {"theta", rep.theta},     {"survival", rep.survival},
              {"alpha", rep.alpha},     {"beta", rep.beta},
              {"dual_theta", rep.dual_theta}, {"dual_mass", rep.dual_mass},
              {"dual_law", rep.dual.probabilities()}};
    if (c.poisson) {
      const double t = c.theta;
      const double dt = rep.dual_theta;
      const double identity = std::abs(dt * std::exp(-dt) - t * std::exp(-t));
      const double tv = DegreeTv(rep.dual, DegreeDist::Poisson(dt, kDualityTail));
      const double beta_gap = std::abs(t * rep.beta - dt);
      const double closed = PoissonDual(t);
      j["poisson_dual"] = closed;
      j["identity_residual"] = identity;
      j["tv_to_poisson"] = tv;
      j["theta_beta_gap"] = beta_gap;
      const std::string tag = "[" + c.spec + "] ";
      checks.Add(tag + "identity_residual", identity, "<", identity_tol, identity < identity_tol);
      checks.Add(tag + "tv_to_poisson", tv, "<", tv_tol, tv < tv_tol);
      checks.Add(tag + "theta_beta_gap", beta_gap, "<", beta_tol, beta_gap < beta_tol);
      const double closed_gap = std::abs(closed - dt);
      checks.Add(tag + "closed_form_gap", closed_gap, "<", beta_tol, closed_gap < beta_tol);
    }
    checks.Add("[" + c.spec + "] dual_mass_error", std::abs(rep.dual_mass - 1.0), "<=", 1e-8,
               std::abs(rep.dual_mass - 1.0) <= 1e-8);
    CsvTable t{"dual_law_" + std::to_string(i), {"k", "rho", "dual"}, {}};
    const int kmax = std::max(c.rho.max_degree(), rep.dual.max_degree());
    for (int k = 0; k <= kmax; ++k) {
      t.rows.push_back({static_cast<double>(k), c.rho[k], rep.dual[k]});
    }
    tables.push_back(std::move(t));
    out.push_back(std::move(j));
  }
  Json metrics = {{"cases", out}};
  if (cases.size() == 1) {
    for (const auto& [k, v] : out[0].items()) metrics[k] = v;
  }
  return Finish("duality", config, ctx, checks, std::move(metrics), std::move(tables));
}

ExperimentResult RunLwcTest(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("lwc-test", user);
  const ConfigSection s(config, "");
  const GraphFamily family = ParseGraphFamily(s.Child("graph"));
  const auto sizes = s.Integers("sizes");
  const int radius = static_cast<int>(s.Integer("radius"));
  const auto limit_samples = s.Integer("limit_samples");
  const auto min_graph_samples = s.Integer("min_graph_samples");
  const double tol = s.Number("tv_tol");
  s.Finish();
  if (sizes.empty()) throw ConfigError("sizes", "sizes: empty");
  if (radius < 0) throw ConfigError("radius", "radius: must be >= 0");
  if (limit_samples < 1) throw ConfigError("limit_samples", "limit_samples: must be >= 1");

  // Graph-side histograms pool independent graphs until min_graph_samples
  // rooted balls are collected, so every size carries the same sampling noise.
  std::map<std::string, BallHistogram> limits;
  std::vector<double> tvs;
  Json per_size = Json::array();
  CsvTable curve{"lwc_tv", {"x", "value", "ci"}, {}};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const int n = sizes[i];
    const DegreeDist rho = family.LimitLaw(n);
    std::ostringstream key;
    key << std::setprecision(17);
    for (double p : rho.probabilities()) key << p << ',';
    if (!limits.contains(key.str())) {
      limits[key.str()] = SampledHistogram(
          [&rho, radius](Seed sd) { return SampleUgw(rho, radius, sd).tree; }, radius,
          limit_samples, DeriveSeed(ctx.seed, 0), ctx.threads);
    }
    const std::int64_t graphs = std::max<std::int64_t>(1, (min_graph_samples + n - 1) / n);
    BallHistogram h;
    h.radius = radius;
    for (std::int64_t r = 0; r < graphs; ++r) {
      const Graph g = family.Make(n, DeriveSeed(ctx.seed, 1 + i, r));
      h.Merge(NeighborhoodHistogram(g, radius, ctx.threads));
    }
    const double tv = HistogramTv(h, limits[key.str()]);
    tvs.push_back(tv);
    per_size.push_back({{"n", n}, {"graphs", graphs}, {"ball_types", h.counts.size()}, {"tv", tv}});
    curve.rows.push_back({static_cast<double>(n), tv, kNaN});
  }
  Checks checks;
  checks.AddFlag("tv strictly decreasing in n", StrictlyDecreasing(tvs));
  checks.Add("tv at largest n", tvs.back(), "<", tol, tvs.back() < tol);
  Json metrics = {{"per_size", per_size}};
  return Finish("lwc-test", config, ctx, checks, std::move(metrics), {curve});
}

namespace {

// Tree depth for limit laws: the horizon for discrete models (exact), an
// explicit choice for diffusions.
int ResolveDepth(std::int64_t configured, const Model& model, const Horizon& h) {
  if (configured >= 0) return static_cast<int>(configured);
  if (IsDiscrete(model)) return h.steps;
  return 3;
}

}  // namespace

ExperimentResult RunEmpTest(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("emp-test", user);
  const ConfigSection s(config, "");
  const GraphFamily family = ParseGraphFamily(s.Child("graph"));
  const auto sizes = s.Integers("sizes");
  const Model model = ParseModel(s.Child("model"));
  const InitSampler init = ParseInit(s.Child("init"), model);
  const Horizon horizon = ParseHorizon(s.Child("horizon"), model);
  const int depth = ResolveDepth(s.Integer("tree_depth"), model, horizon);
  const auto replicas = s.Integer("limit_replicas");
  const double tv_tol = s.Number("tv_tol");
  const double w1_tol = s.Number("w1_tol");
  const int w1_samples = static_cast<int>(s.Integer("w1_samples"));
  s.Finish();
  if (sizes.empty()) throw ConfigError("sizes", "sizes: empty");
  if (replicas < 1) throw ConfigError("limit_replicas", "limit_replicas: must be >= 1");
  if (IsDiscrete(model) && depth < horizon.steps) {
    throw ConfigError("tree_depth", "tree_depth: must be >= the horizon for discrete models");
  }

  const DegreeDist rho = family.LimitLaw(sizes.back());
  Json metrics;
  EmpiricalMeasure limit;
  if (IsDiscrete(model)) {
    limit = RootLawMonteCarlo([&](Seed sd) { return SampleUgw(rho, depth, sd).tree; }, init,
                              model, horizon, replicas, DeriveSeed(ctx.seed, 0), ctx.threads);
  } else {
    auto sens = RootLawDepthSensitivity(
        [&](int d, Seed sd) { return SampleUgw(rho, d, sd).tree; }, depth, init, model,
        horizon, replicas, DeriveSeed(ctx.seed, 0), ctx.threads);
    metrics["depth_sensitivity"] = {{"depth", depth}, {"w1_shift_depth_plus_2", sens.w1_shift}};
    limit = std::move(sens.base);
  }
  std::vector<double> dist;
  Json per_size = Json::array();
  CsvTable curve{IsDiscrete(model) ? "emp_tv" : "emp_w1", {"x", "value", "ci"}, {}};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const int n = sizes[i];
    const Graph g = family.Make(n, DeriveSeed(ctx.seed, 1, i));
    const Marks marks = init(g, DeriveSeed(ctx.seed, 2, i));
    const TrajectorySet ts = Simulate(g, marks, model, horizon, DeriveSeed(ctx.seed, 3, i));
    const EmpiricalMeasure emp = GlobalEmpirical(ts);
    const double d = IsDiscrete(model)
                         ? TvDiscrete(emp, limit)
                         : Wasserstein1Paths(emp, limit, ts.times.back(), w1_samples,
                                             DeriveSeed(ctx.seed, 4, i));
    dist.push_back(d);
    per_size.push_back({{"n", n}, {IsDiscrete(model) ? "tv" : "w1", d}});
    curve.rows.push_back({static_cast<double>(n), d, kNaN});
  }
  metrics["per_size"] = per_size;
  metrics["limit_replicas"] = replicas;
  metrics["tree_depth"] = depth;
  Checks checks;
  if (IsDiscrete(model)) {
    checks.AddFlag("tv strictly decreasing in n", StrictlyDecreasing(dist));
    checks.Add("tv at largest n", dist.back(), "<", tv_tol, dist.back() < tv_tol);
  } else {
    checks.Add("w1 at largest n", dist.back(), "<", w1_tol, dist.back() < w1_tol);
  }
  return Finish("emp-test", config, ctx, checks, std::move(metrics), {curve});
}

ExperimentResult RunCompEmpTest(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("comp-emp-test", user);
  const ConfigSection s(config, "");
  const Model model = ParseModel(s.Child("model"));
  const InitSampler init = ParseInit(s.Child("init"), model);
  const Horizon horizon = ParseHorizon(s.Child("horizon"), model);
  const int depth = ResolveDepth(s.Integer("tree_depth"), model, horizon);
  const PathFunctional f = FinalStateFunctional();
  Checks checks;
  Json metrics = Json::object();
  std::vector<CsvTable> tables;

  if (s.Has("giant")) {
    const ConfigSection g = s.Child("giant");
    const int n = static_cast<int>(g.Integer("n"));
    const double theta = g.Number("theta");
    const auto replicas = g.Integer("replicas");
    const double tol = g.Number("tol");
    g.Finish();
    const double oracle = SurvivalProb(DegreeDist::Poisson(theta));
    const MeanStderr frac = GiantFraction(
        [n, theta](Seed sd) { return GenErdosRenyi(n, std::min(1.0, theta / n), sd); },
        replicas, DeriveSeed(ctx.seed, 1), ctx.threads);
    metrics["giant"] = {{"n", n}, {"theta", theta}, {"mean", frac.mean},
                        {"std_error", frac.std_error}, {"survival", oracle}};
    checks.Add("giant fraction error", std::abs(frac.mean - oracle), "<=", tol,
               std::abs(frac.mean - oracle) <= tol);
  }

  if (s.Has("subcritical")) {
    const ConfigSection c = s.Child("subcritical");
    const int n = static_cast<int>(c.Integer("n"));
    const double theta = c.Number("theta");
    const auto draws = c.Integer("root_draws");
    const auto tree_draws = c.Integer("tree_draws");
    const double tol = c.Number("ks_tol");
    c.Finish();
    if (!(theta < 1.0)) throw ConfigError("theta", "subcritical.theta: must be < 1");
    const auto comp = ComponentFunctionalDistribution(
        [n, theta](Seed sd) { return GenErdosRenyi(n, std::min(1.0, theta / n), sd); }, init,
        model, f, horizon, draws, DeriveSeed(ctx.seed, 2), ctx.threads);
    const DegreeDist rho = DegreeDist::Poisson(theta);
    const auto tree = TreeFunctionalSample(
        [&rho](Seed sd) { return SampleUgw(rho, kUnlimitedDepth, sd).tree; }, init, model, f,
        horizon, tree_draws, DeriveSeed(ctx.seed, 3), ctx.threads);
    std::vector<double> values;
    for (const auto& d : comp.draws) values.push_back(d.value);
    const double ks = KolmogorovSmirnov(values, tree);
    metrics["subcritical"] = {{"n", n}, {"theta", theta}, {"root_draws", draws},
                              {"tree_draws", tree_draws}, {"ks", ks},
                              {"mean_component", Mean(values)}, {"mean_tree", Mean(tree)}};
    checks.Add("subcritical KS", ks, "<", tol, ks < tol);
    CsvTable cdf{"subcritical_cdf", {"x", "component_cdf", "tree_cdf"}, {}};
    std::sort(values.begin(), values.end());
    std::vector<double> sorted_tree = tree;
    std::sort(sorted_tree.begin(), sorted_tree.end());
    const double lo = std::min(values.front(), sorted_tree.front());
    const double hi = std::max(values.back(), sorted_tree.back());
    for (int i = 0; i <= 100; ++i) {
      const double x = lo + (hi - lo) * i / 100.0;
      auto ecdf = [x](const std::vector<double>& v) {
        return static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin()) / v.size();
      };
      cdf.rows.push_back({x, ecdf(values), ecdf(sorted_tree)});
    }
    tables.push_back(std::move(cdf));
  }

  if (s.Has("supercritical")) {
    const ConfigSection c = s.Child("supercritical");
    const int n = static_cast<int>(c.Integer("n"));
    const double theta = c.Number("theta");
    const auto draws = c.Integer("root_draws");
    const int pool = static_cast<int>(c.Integer("pool_graphs"));
    const auto replicas = c.Integer("limit_replicas");
    const double giant_tol = c.Number("giant_tol");
    const double tv_tol = c.Number("tv_tol");
    const double w1_tol = c.Number("w1_tol");
    c.Finish();
    if (!(theta > 1.0)) throw ConfigError("theta", "supercritical.theta: must be > 1");
    if (pool < 1) throw ConfigError("pool_graphs", "supercritical.pool_graphs: must be >= 1");
    const auto comp = ComponentFunctionalDistribution(
        [n, theta](Seed sd) { return GenErdosRenyi(n, std::min(1.0, theta / n), sd); }, init,
        model, f, horizon, draws, DeriveSeed(ctx.seed, 4), ctx.threads, pool);
    const DegreeDist rho = DegreeDist::Poisson(theta);
    const double s_rho = SurvivalProb(rho);
    double in_largest = 0.0;
    for (const auto& d : comp.draws) in_largest += d.in_largest ? 1.0 : 0.0;
    in_largest /= static_cast<double>(draws);
    const EmpiricalMeasure limit = RootLawMonteCarlo(
        [&rho, depth](Seed sd) { return SampleUgwSurviving(rho, depth, sd).tree; }, init, model,
        horizon, replicas, DeriveSeed(ctx.seed, 5), ctx.threads);
    Json j = {{"n", n}, {"theta", theta}, {"root_draws", draws},
              {"fraction_in_largest", in_largest}, {"survival", s_rho},
              {"pooled_paths", comp.largest.size()}, {"pooled_graphs", comp.largest_graphs}};
    checks.Add("fraction of roots in the largest component, error",
               std::abs(in_largest - s_rho), "<=", giant_tol,
               std::abs(in_largest - s_rho) <= giant_tol);
    if (IsDiscrete(model)) {
      const double tv = TvDiscrete(comp.largest, limit);
      j["tv_to_surviving_tree"] = tv;
      checks.Add("tv, largest component vs surviving tree", tv, "<", tv_tol, tv < tv_tol);
    } else {
      const double w1 = Wasserstein1Paths(comp.largest, limit, limit.times.back(),
                                          kDefaultW1Samples, DeriveSeed(ctx.seed, 6));
      j["w1_to_surviving_tree"] = w1;
      checks.Add("w1, largest component vs surviving tree", w1, "<", w1_tol, w1 < w1_tol);
    }
    metrics["supercritical"] = std::move(j);
  }
  s.Finish();
  return Finish("comp-emp-test", config, ctx, checks, std::move(metrics), std::move(tables));
}

ExperimentResult RunCorrDecay(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("corr-decay", user);
  const ConfigSection top(config, "");
  const std::string mode = top.String("mode");
  if (mode != "discrete" && mode != "diffusion") {
    throw ConfigError("mode", "mode: expected \"discrete\" or \"diffusion\"");
  }
  const ConfigSection s = top.Child(mode);
  top.Has(mode == "discrete" ? "diffusion" : "discrete");
  top.Finish();
  Checks checks;
  Json metrics = {{"mode", mode}};
  CsvTable curve{"covariance", {"x", "value", "ci"}, {}};

  const Model model = ParseModel(s.Child("model"));
  const InitSampler init = ParseInit(s.Child("init"), model);
  const auto distances = s.Integers("distances");
  const auto replicas = s.Integer("replicas");
  const double z = s.Number("z");
  if (distances.empty()) throw ConfigError("distances", mode + ".distances: empty");

  if (mode == "discrete") {
    RequireDiscrete(model, "corr-decay (discrete)");
    const int dim = static_cast<int>(s.Integer("dim"));
    const int half = static_cast<int>(s.Integer("n"));
    const auto pairs_n = s.Integer("locality_pairs");
    const int max_k = static_cast<int>(s.Integer("max_k"));
    const int cov_k = static_cast<int>(s.Integer("covariance_k"));
    s.Finish();
    if (max_k < 1) throw ConfigError("max_k", "discrete.max_k: must be >= 1");
    const RootedGraph lat = GenLatticeBox(dim, half);
    const LatticeBox box(dim, half);
    const Graph& g = lat.graph;
    const int nv = g.num_vertices();

    // Exact locality: replacing the noise outside B_k(v) leaves X_v[0..k]
    // bit-for-bit unchanged.
    CounterRng pick(DeriveSeed(ctx.seed, 1));
    std::int64_t identical = 0;
    Json samples = Json::array();
    for (std::int64_t i = 0; i < pairs_n; ++i) {
      const int v = static_cast<int>(pick.UniformInt(static_cast<std::uint64_t>(nv)));
      const int k = 1 + static_cast<int>(pick.UniformInt(static_cast<std::uint64_t>(max_k)));
      const Marks marks = init(g, DeriveSeed(ctx.seed, 2, i));
      const auto keys = DefaultNoiseKeys(nv, DeriveSeed(ctx.seed, 3, i));
      auto swapped = keys;
      const auto dist = BfsDistances(g, std::vector<int>{v}, k);
      const Seed other = DeriveSeed(ctx.seed, 4, i);
      for (int u = 0; u < nv; ++u) {
        if (dist[u] < 0) swapped[u] = {other, static_cast<std::uint64_t>(u)};
      }
      const auto a = Simulate(g, marks, model, Horizon::Discrete(k), keys);
      const auto b = Simulate(g, marks, model, Horizon::Discrete(k), swapped);
      const auto pa = a.path(v).at(0);
      const auto pb = b.path(v).at(0);
      const bool same = std::memcmp(pa.data(), pb.data(),
                                    sizeof(double) * static_cast<std::size_t>(k + 1) * a.dim) == 0;
      identical += same ? 1 : 0;
      samples.push_back({{"vertex", v}, {"k", k}, {"identical", same}});
    }
    checks.Add("locality pairs with identical root paths", static_cast<double>(identical),
               "==", static_cast<double>(pairs_n), identical == pairs_n);

    std::vector<RegionPair> pairs;
    for (int d : distances) {
      if (d < 1 || d > 2 * half) throw ConfigError("distances", "discrete.distances: must lie in [1, 2n]");
      std::vector<int> c1(static_cast<std::size_t>(dim), 0), c2(static_cast<std::size_t>(dim), 0);
      c1[0] = -(d / 2);
      c2[0] = d - d / 2;
      pairs.push_back({{box.Index(c1)}, {box.Index(c2)}, d});
    }
    const DecayProfile prof =
        CovarianceDecayProfile(g, init, model, pairs, FinalMeanFunctional(),
                               Horizon::Discrete(cov_k), replicas, DeriveSeed(ctx.seed, 5), z,
                               ctx.threads);
    Json points = Json::array();
    for (const auto& p : prof.points) {
      points.push_back({{"distance", p.distance}, {"covariance", p.covariance},
                        {"ci_half_width", p.ci_half_width}});
      curve.rows.push_back({static_cast<double>(p.distance), p.covariance, p.ci_half_width});
      if (p.distance > 2 * cov_k) {
        checks.Add("|cov| within CI at distance " + std::to_string(p.distance),
                   std::abs(p.covariance), "<=", p.ci_half_width,
                   std::abs(p.covariance) <= p.ci_half_width);
      }
    }
    metrics["locality"] = {{"pairs", pairs_n}, {"identical", identical}, {"samples", samples}};
    metrics["covariance"] = {{"k", cov_k}, {"replicas", replicas}, {"z", z}, {"points", points}};
    return Finish("corr-decay", config, ctx, checks, std::move(metrics), {curve});
  }

  const int n = static_cast<int>(s.Integer("n"));
  const int anchor = static_cast<int>(s.Integer("anchor"));
  const Horizon horizon = ParseHorizon(s.Child("horizon"), model);
  const int envelope_from = static_cast<int>(s.Integer("envelope_from"));
  s.Finish();
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  const Graph g = Graph::FromEdges(n, edges);
  std::vector<RegionPair> pairs;
  for (int d : distances) {
    if (d < 1 || anchor < 0 || anchor + d >= n) {
      throw ConfigError("distances", "diffusion.distances: anchor + distance leaves the path");
    }
    pairs.push_back({{anchor}, {anchor + d}, d});
  }
  const DecayProfile prof = CovarianceDecayProfile(g, init, model, pairs, FinalMeanFunctional(),
                                                   horizon, replicas, DeriveSeed(ctx.seed, 5),
                                                   z, ctx.threads);
  // Envelope c^{ceil(d/2)} / ceil(d/2)! through the first point.
  const auto& first = prof.points.front();
  const int h0 = (first.distance + 1) / 2;
  const double c = std::pow(std::abs(first.covariance) * std::tgamma(h0 + 1.0), 1.0 / h0);
  auto envelope = [c](int d) {
    const int h = (d + 1) / 2;
    return std::pow(c, h) / std::tgamma(h + 1.0);
  };
  CsvTable env_curve{"covariance", {"x", "value", "ci", "envelope"}, {}};
  Json points = Json::array();
  for (std::size_t i = 0; i < prof.points.size(); ++i) {
    const auto& p = prof.points[i];
    points.push_back({{"distance", p.distance}, {"covariance", p.covariance},
                      {"ci_half_width", p.ci_half_width}, {"envelope", envelope(p.distance)}});
    env_curve.rows.push_back({static_cast<double>(p.distance), p.covariance, p.ci_half_width,
                              envelope(p.distance)});
    if (i > 0) {
      const auto& q = prof.points[i - 1];
      const double rise = std::abs(p.covariance) - std::abs(q.covariance);
      const double slack = p.ci_half_width + q.ci_half_width;
      checks.Add("|cov| rise from d=" + std::to_string(q.distance) + " to d=" +
                     std::to_string(p.distance),
                 rise, "<=", slack, rise <= slack);
    }
    if (p.distance >= envelope_from) {
      const double excess = std::abs(p.covariance) - envelope(p.distance);
      checks.Add("|cov| above envelope at d=" + std::to_string(p.distance), excess, "<=",
                 p.ci_half_width, excess <= p.ci_half_width);
    }
  }
  metrics["covariance"] = {{"replicas", replicas}, {"z", z}, {"envelope_c", c},
                           {"first_point_significant",
                            std::abs(first.covariance) > first.ci_half_width},
                           {"points", points}};
  return Finish("corr-decay", config, ctx, checks, std::move(metrics), {env_curve});
}

ExperimentResult RunTreeCounterexample(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("tree-counterexample", user);
  const ConfigSection s(config, "");
  const int d = static_cast<int>(s.Integer("d"));
  const int height = static_cast<int>(s.Integer("height"));
  const Model model = ParseModel(s.Child("model"));
  const InitSampler init = ParseInit(s.Child("init"), model);
  const Horizon horizon = ParseHorizon(s.Child("horizon"), model);
  const auto replicas = s.Integer("limit_replicas");
  const int max_level = static_cast<int>(s.Integer("canopy_max_level"));
  const double regular_min = s.Number("regular_min_tv");
  const double canopy_tol = s.Number("canopy_tol");
  s.Finish();
  RequireDiscrete(model, "tree-counterexample");
  if (d < 3) throw ConfigError("d", "d: must be >= 3");
  if (max_level < 0) throw ConfigError("canopy_max_level", "canopy_max_level: must be >= 0");
  const int k = horizon.steps;

  const RootedGraph tree = GenRegularTree(d, height);
  const TrajectorySet ts = Simulate(tree.graph, init(tree.graph, DeriveSeed(ctx.seed, 1)), model,
                                    horizon, DeriveSeed(ctx.seed, 2));
  const EmpiricalMeasure emp = GlobalEmpirical(ts);

  // B_k of the infinite regular tree is the height-k regular tree.
  const RootedGraph ball = GenRegularTree(d, k);
  const EmpiricalMeasure regular = RootLawMonteCarlo(
      [&ball](Seed) { return ball; }, init, model, horizon, replicas, DeriveSeed(ctx.seed, 3),
      ctx.threads);

  // Canopy mixture: level i carries weight (d-2)/(d-1)^{i+1}; replicas are
  // split in proportion after renormalising over i <= max_level.
  std::vector<double> weights;
  double total = 0.0;
  for (int i = 0; i <= max_level; ++i) {
    weights.push_back((d - 2.0) / std::pow(d - 1.0, i + 1));
    total += weights.back();
  }
  CsvTable mix_table{"canopy_mixture", {"level", "weight", "replicas"}, {}};
  EmpiricalMeasure mixture;
  for (int i = 0; i <= max_level; ++i) {
    const auto ri = static_cast<std::int64_t>(std::llround(replicas * weights[i] / total));
    mix_table.rows.push_back({static_cast<double>(i), weights[i] / total, static_cast<double>(ri)});
    if (ri == 0) continue;
    // Levels i + k + 1 keep the truncation boundary outside B_k((i, 0)).
    const RootedGraph canopy = GenCanopyTruncation(d, i + k + 1, 1, i).rooted;
    mixture.Append(RootLawMonteCarlo([&canopy](Seed) { return canopy; }, init, model, horizon,
                                     ri, DeriveSeed(ctx.seed, 4, i), ctx.threads));
  }
  const double tv_regular = TvDiscrete(emp, regular);
  const double tv_canopy = TvDiscrete(emp, mixture);
  Checks checks;
  checks.Add("tv to the regular-tree root law", tv_regular, ">", regular_min, tv_regular > regular_min);
  checks.Add("tv to the canopy mixture", tv_canopy, "<", canopy_tol, tv_canopy < canopy_tol);
  Json metrics = {{"vertices", tree.size()},
                  {"tv_regular", tv_regular},
                  {"tv_canopy", tv_canopy},
                  {"mixture_replicas", mixture.size()}};
  return Finish("tree-counterexample", config, ctx, checks, std::move(metrics), {mix_table});
}

ExperimentResult RunLatticeTest(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("lattice-test", user);
  const ConfigSection s(config, "");
  const int dim = static_cast<int>(s.Integer("dim"));
  const auto sizes = s.Integers("sizes");
  const Model model = ParseModel(s.Child("model"));
  const InitSampler init = ParseInit(s.Child("init"), model);
  const Horizon horizon = ParseHorizon(s.Child("horizon"), model);
  const auto replicas = s.Integer("limit_replicas");
  const double tol = s.Number("tv_tol");
  s.Finish();
  RequireDiscrete(model, "lattice-test");
  if (sizes.empty()) throw ConfigError("sizes", "sizes: empty");
  // B_k(0) of Z^d sits inside the box [-k, k]^d, so its root law is exact.
  const RootedGraph ball = GenLatticeBox(dim, std::max(horizon.steps, 1));
  const EmpiricalMeasure limit = RootLawMonteCarlo(
      [&ball](Seed) { return ball; }, init, model, horizon, replicas, DeriveSeed(ctx.seed, 0),
      ctx.threads);
  std::vector<double> tvs;
  Json per_size = Json::array();
  CsvTable curve{"lattice_tv", {"x", "value", "ci"}, {}};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const RootedGraph lat = GenLatticeBox(dim, sizes[i]);
    const TrajectorySet ts = Simulate(lat.graph, init(lat.graph, DeriveSeed(ctx.seed, 1, i)),
                                      model, horizon, DeriveSeed(ctx.seed, 2, i));
    const double tv = TvDiscrete(GlobalEmpirical(ts), limit);
    tvs.push_back(tv);
    per_size.push_back({{"half_width", sizes[i]}, {"vertices", lat.size()}, {"tv", tv}});
    curve.rows.push_back({static_cast<double>(sizes[i]), tv, kNaN});
  }
  Checks checks;
  checks.AddFlag("tv strictly decreasing in box size", StrictlyDecreasing(tvs));
  checks.Add("tv at the largest box", tvs.back(), "<", tol, tvs.back() < tol);
  return Finish("lattice-test", config, ctx, checks, {{"per_size", per_size}}, {curve});
}

ExperimentResult RunErgodicity(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("ergodicity", user);
  const ConfigSection s(config, "");
  const int dim = static_cast<int>(s.Integer("dim"));
  const int half = static_cast<int>(s.Integer("n"));
  const Model model = ParseModel(s.Child("model"));
  const InitSampler init = ParseInit(s.Child("init"), model);
  const Horizon horizon = ParseHorizon(s.Child("horizon"), model);
  const std::string functional = s.String("functional");
  const int w = static_cast<int>(s.Integer("window"));
  const auto box_sizes = s.Integers("box_sizes");
  const auto replicas = s.Integer("replicas");
  const double slope_min = s.Number("slope_min");
  const double slope_max = s.Number("slope_max");
  s.Finish();
  LocalFunctional f;
  if (functional == "agreement") {
    f = AgreementFunctional(w);
  } else if (functional == "window_mean") {
    f = WindowMeanFunctional(w);
  } else {
    throw ConfigError("functional", "functional: expected \"agreement\" or \"window_mean\"");
  }
  if (replicas < 20) throw ConfigError("replicas", "replicas: at least 20 are needed");
  if (box_sizes.size() < 2) throw ConfigError("box_sizes", "box_sizes: need two or more");
  const RootedGraph lat = GenLatticeBox(dim, half);
  const LatticeBox box(dim, half);
  std::vector<std::vector<double>> averages(static_cast<std::size_t>(replicas));
  ParallelFor(averages.size(), ctx.threads, [&](std::size_t r) {
    const Marks marks = init(lat.graph, DeriveSeed(ctx.seed, 1, r));
    const TrajectorySet ts = Simulate(lat.graph, marks, model, horizon, DeriveSeed(ctx.seed, 2, r));
    averages[r] = ShiftAverage(ts, box, f, w, box_sizes);
  });
  const auto curve = ErgodicityVarianceCurve(averages, box_sizes);
  CsvTable table{"shift_average_variance", {"x", "value", "ci"}, {}};
  std::vector<double> x, y;
  bool positive = true;
  Json points = Json::array();
  for (const auto& p : curve) {
    const double volume = std::pow(static_cast<double>(p.box_size), dim);
    table.rows.push_back({volume, p.variance, kNaN});
    points.push_back({{"box_size", p.box_size}, {"volume", volume}, {"variance", p.variance}});
    positive = positive && p.variance > 0.0;
    x.push_back(std::log(volume));
    y.push_back(p.variance > 0.0 ? std::log(p.variance) : 0.0);
  }
  Checks checks;
  Json metrics = {{"points", points}, {"replicas", replicas}};
  if (positive) {
    const LinearFit fit = FitLine(x, y);
    metrics["slope"] = fit.slope;
    metrics["r_squared"] = fit.r_squared;
    checks.Add("log-variance slope >= min", fit.slope, ">=", slope_min, fit.slope >= slope_min);
    checks.Add("log-variance slope <= max", fit.slope, "<=", slope_max, fit.slope <= slope_max);
  } else {
    metrics["slope"] = nullptr;
    checks.AddFlag("all variances positive (slope defined)", false);
  }
  return Finish("ergodicity", config, ctx, checks, std::move(metrics), {table});
}

ExperimentResult RunGibbsCheck(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("gibbs-check", user);
  const ConfigSection s(config, "");
  const int half = static_cast<int>(s.Integer("grid_half_width"));
  const double beta = s.Number("beta");
  const double lambda_plus = s.Number("lambda_plus");
  const auto burn_in = s.Integer("burn_in");
  const auto sweeps = s.Integer("sweeps");
  const double marginal_tol = s.Number("marginal_tol");
  const int small_graphs = static_cast<int>(s.Integer("small_graphs"));
  const double exact_tol = s.Number("exact_tol");
  s.Finish();
  Checks checks;

  // Glauber against exact enumeration on the grid.
  const Graph grid = GenLatticeBox(2, half).graph;
  const GibbsSpec ising = GibbsSpec::Ising(beta, lambda_plus);
  const ExactGibbs exact = ExactGibbsMeasure(grid, ising);
  const auto exact_marginals = exact.Marginals();
  const auto edges = grid.edges();
  std::vector<double> exact_agree(edges.size(), 0.0);
  for (std::size_t i = 0; i < exact.probabilities.size(); ++i) {
    const auto x = exact.Decode(static_cast<std::int64_t>(i));
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (x[edges[e].first] == x[edges[e].second]) exact_agree[e] += exact.probabilities[i];
    }
  }
  const int nv = grid.num_vertices();
  std::vector<double> plus(static_cast<std::size_t>(nv), 0.0), agree(edges.size(), 0.0);
  GlauberChain(grid, ising, burn_in, sweeps, DeriveSeed(ctx.seed, 1), [&](const Configuration& x) {
    for (int v = 0; v < nv; ++v) plus[v] += x[v] == 1 ? 1.0 : 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      agree[e] += x[edges[e].first] == x[edges[e].second] ? 1.0 : 0.0;
    }
  });
  double marginal_err = 0.0, agree_err = 0.0;
  for (int v = 0; v < nv; ++v) {
    marginal_err = std::max(marginal_err,
                            std::abs(plus[v] / sweeps - exact_marginals[static_cast<std::size_t>(v) * 2 + 1]));
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    agree_err = std::max(agree_err, std::abs(agree[e] / sweeps - exact_agree[e]));
  }
  checks.Add("max Glauber marginal error", marginal_err, "<=", marginal_tol, marginal_err <= marginal_tol);
  checks.Add("max Glauber edge-agreement error", agree_err, "<=", marginal_tol, agree_err <= marginal_tol);

  // Markov property and detailed balance on small graphs with random specs.
  double mrf_err = 0.0, balance_err = 0.0;
  for (int t = 0; t < small_graphs; ++t) {
    CounterRng rng(DeriveSeed(ctx.seed, 2, t));
    std::vector<Edge> e5;
    if (t == 0) {
      for (int i = 0; i < 5; ++i) e5.emplace_back(i, (i + 1) % 5);
    } else {
      for (int i = 0; i < 5; ++i) {
        for (int j = i + 1; j < 5; ++j) {
          if (rng.Bernoulli(0.5)) e5.emplace_back(i, j);
        }
      }
    }
    const Graph g = Graph::FromEdges(5, e5);
    const int q = 2 + t % 2;
    GibbsSpec spec;
    for (int a = 0; a < q; ++a) spec.alphabet.push_back(a);
    spec.psi.assign(static_cast<std::size_t>(q) * q, 0.0);
    for (int a = 0; a < q; ++a) {
      for (int b = a; b < q; ++b) {
        const double v = 0.3 + 2.0 * rng.Uniform();
        spec.psi[static_cast<std::size_t>(a) * q + b] = v;
        spec.psi[static_cast<std::size_t>(b) * q + a] = v;
      }
    }
    double lsum = 0.0;
    for (int a = 0; a < q; ++a) {
      spec.lambda.push_back(0.2 + rng.Uniform());
      lsum += spec.lambda.back();
    }
    for (double& l : spec.lambda) l /= lsum;
    const ExactGibbs pi = ExactGibbsMeasure(g, spec);
    const auto states = static_cast<std::int64_t>(pi.probabilities.size());

    for (int mask = 1; mask < 31; ++mask) {
      std::vector<int> region;
      for (int v = 0; v < 5; ++v) {
        if (mask >> v & 1) region.push_back(v);
      }
      const auto boundary_vertices = OuterBoundary(g, region);
      for (std::int64_t i = 0; i < states; ++i) {
        const auto x = pi.Decode(i);
        bool canonical = true;  // one representative per outside configuration
        for (int v : region) canonical = canonical && x[v] == 0;
        if (!canonical) continue;
        std::map<int, int> boundary;
        for (int b : boundary_vertices) boundary[b] = x[b];
        const KernelDistribution kernel = ConditionalKernel(g, spec, region, boundary);
        double mass = 0.0;
        std::vector<double> joint(kernel.probabilities.size());
        for (std::size_t j = 0; j < joint.size(); ++j) {
          auto y = x;
          const auto ya = kernel.Decode(static_cast<std::int64_t>(j));
          for (std::size_t r = 0; r < region.size(); ++r) y[region[r]] = ya[r];
          joint[j] = pi.probabilities[pi.Encode(y)];
          mass += joint[j];
        }
        for (std::size_t j = 0; j < joint.size(); ++j) {
          mrf_err = std::max(mrf_err, std::abs(joint[j] / mass - kernel.probabilities[j]));
        }
      }
    }
    for (std::int64_t i = 0; i < states; ++i) {
      const auto x = pi.Decode(i);
      for (int v = 0; v < 5; ++v) {
        const auto kx = SingleSiteKernel(g, spec, x, v);
        for (int a = 0; a < q; ++a) {
          if (a == x[v]) continue;
          auto y = x;
          y[v] = a;
          const auto ky = SingleSiteKernel(g, spec, y, v);
          const double flow_xy = pi.probabilities[i] * kx[a] / 5.0;
          const double flow_yx = pi.probabilities[pi.Encode(y)] * ky[x[v]] / 5.0;
          balance_err = std::max(balance_err, std::abs(flow_xy - flow_yx));
        }
      }
    }
  }
  checks.Add("max Markov-property error", mrf_err, "<=", exact_tol, mrf_err <= exact_tol);
  checks.Add("max detailed-balance error", balance_err, "<=", exact_tol, balance_err <= exact_tol);
  Json metrics = {{"grid_vertices", nv},
                  {"marginal_error", marginal_err},
                  {"edge_agreement_error", agree_err},
                  {"markov_error", mrf_err},
                  {"detailed_balance_error", balance_err},
                  {"partition_function", exact.partition_function}};
  return Finish("gibbs-check", config, ctx, checks, std::move(metrics), {});
}

ExperimentResult RunIntegratorCheck(const Json& user, const RunContext& ctx) {
  const Json config = Prepare("integrator-check", user);
  const ConfigSection s(config, "");
  const auto dts = s.Numbers("dts");
  const double t_end = s.Number("t");
  const auto x0 = s.Numbers("x0");
  const double factor = s.Number("error_factor");
  s.Finish();
  if (x0.size() != 2) throw ConfigError("x0", "x0: two initial values expected");
  const Graph k2 = Graph::FromEdges(2, std::vector<Edge>{{0, 1}});
  const DiffusionModel model = ConsensusSdeModel(0.0);
  const double mean = 0.5 * (x0[0] + x0[1]);
  Checks checks;
  std::vector<double> errors;
  CsvTable curve{"integrator_error", {"x", "value", "ci"}, {}};
  for (double dt : dts) {
    const TrajectorySet ts = SimulateDiffusion(k2, Marks::Vector(1, x0), model, t_end, dt, ctx.seed);
    double err = 0.0;
    for (int i = 0; i < ts.length(); ++i) {
      for (int v = 0; v < 2; ++v) {
        const double exact = mean + (x0[v] - mean) * std::exp(-2.0 * ts.times[i]);
        err = std::max(err, std::abs(ts.at(v, i)[0] - exact));
      }
    }
    errors.push_back(err);
    curve.rows.push_back({dt, err, kNaN});
    std::ostringstream name;
    name << "max error at dt=" << dt;
    checks.Add(name.str(), err, "<=", factor * dt, err <= factor * dt);
  }
  checks.AddFlag("error decreasing with dt", StrictlyDecreasing(errors));
  return Finish("integrator-check", config, ctx, checks, {{"errors", errors}}, {curve});
}

}  // namespace lwsim
