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

// Config-driven experiments behind the command-line subcommands and the
// acceptance suite. Every runner is a pure function of (config, seed); the
// thread count changes wall time only.
#ifndef LWSIM_EXPERIMENTS_HPP_
#define LWSIM_EXPERIMENTS_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lwsim/dynamics.hpp"
#include "lwsim/empirical.hpp"
#include "lwsim/errors.hpp"
#include "lwsim/graph.hpp"
#include "lwsim/limit_trees.hpp"
#include "lwsim/random.hpp"

namespace lwsim {

using Json = nlohmann::json;

// A configuration problem tied to a key (the last path component), so the
// caller can point at the offending line.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string key, const std::string& what)
      : InvalidArgument(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Typed, strict view of a JSON object. Finish() rejects keys that were never
// read, which catches misspelt options.
class ConfigSection {
 public:
  ConfigSection(const Json& j, std::string path);

  bool Has(const std::string& key) const;
  double Number(const std::string& key) const;
  double Number(const std::string& key, double fallback) const;
  std::int64_t Integer(const std::string& key) const;
  std::int64_t Integer(const std::string& key, std::int64_t fallback) const;
  std::string String(const std::string& key) const;
  std::string String(const std::string& key, const std::string& fallback) const;
  std::vector<double> Numbers(const std::string& key) const;
  std::vector<int> Integers(const std::string& key) const;
  ConfigSection Child(const std::string& key) const;
  // Empty object when absent.
  ConfigSection ChildOrEmpty(const std::string& key) const;
  const Json& Raw(const std::string& key) const;
  void Finish() const;

  const std::string& path() const { return path_; }

 private:
  const Json& At(const std::string& key) const;
  [[noreturn]] void Fail(const std::string& key, const std::string& what) const;

  const Json* json_;
  std::string path_;
  mutable std::set<std::string> used_;
};

struct RunContext {
  Seed seed = 0;
  int threads = 1;
};

// Columns x, value, ci unless a table says otherwise.
struct CsvTable {
  std::string name;
  std::vector<std::string> header{"x", "value", "ci"};
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  bool pass = true;
  Json summary;
  std::vector<CsvTable> tables;
};

// Writes doubles with round-trip precision; NaN becomes an empty cell.
void WriteCsv(std::ostream& out, const CsvTable& table);

// ---------------------------------------------------------------------------
// Shared spec parsers.

// Graph families for size sweeps: {"type": "er", "c": 2} etc. The `n` of a
// sweep is supplied separately.
struct GraphFamily {
  std::string type;
  double p = 0.0;           // er with a fixed p
  double c = 0.0;           // er with p = c / n
  std::int64_t m = 0;       // gnm
  int k = 0;                // regular degree
  DegreeDist rho;           // config
  bool fixed_p = false;

  Graph Make(int n, Seed seed) const;
  // Offspring law of the local limit UGW(rho).
  DegreeDist LimitLaw(int n) const;
};

GraphFamily ParseGraphFamily(const ConfigSection& s);
Model ParseModel(const ConfigSection& s);
// {"k": 4} for discrete models, {"t": 1, "dt": 0.001} for diffusions.
Horizon ParseHorizon(const ConfigSection& s, const Model& model);
// {"type": "bernoulli", "p": 0.5} | {"type": "gaussian", ...} |
// {"type": "constant", "value": 0, "kind": "discrete"|"vector", "dim": 1} |
// {"type": "gibbs", "ising": {"beta": .., "lambda_plus": ..}, "sweeps": 50}
InitSampler ParseInit(const ConfigSection& s, const Model& model);

// ---------------------------------------------------------------------------
// Runners, one per subcommand.

struct GraphGenResult {
  ExperimentResult result;
  Graph graph;
  std::optional<int> root;
};

GraphGenResult RunGraphGen(const Json& config, const RunContext& ctx);
ExperimentResult RunDuality(const Json& config, const RunContext& ctx);
ExperimentResult RunLwcTest(const Json& config, const RunContext& ctx);
ExperimentResult RunEmpTest(const Json& config, const RunContext& ctx);
ExperimentResult RunCompEmpTest(const Json& config, const RunContext& ctx);
ExperimentResult RunCorrDecay(const Json& config, const RunContext& ctx);
ExperimentResult RunTreeCounterexample(const Json& config, const RunContext& ctx);
ExperimentResult RunLatticeTest(const Json& config, const RunContext& ctx);
ExperimentResult RunErgodicity(const Json& config, const RunContext& ctx);

// Checks without a subcommand of their own.
ExperimentResult RunGibbsCheck(const Json& config, const RunContext& ctx);
ExperimentResult RunIntegratorCheck(const Json& config, const RunContext& ctx);

// Default configuration of each runner, by subcommand name.
Json DefaultConfig(const std::string& experiment);

// Recursive merge of `user` over `defaults`. The polymorphic sections graph,
// model, init, horizon and ising are replaced wholesale; a null value
// removes the key.
Json MergeConfig(const Json& defaults, const Json& user);

}  // namespace lwsim

#endif  // LWSIM_EXPERIMENTS_HPP_
