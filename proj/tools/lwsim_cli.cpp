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

// lwsim: seeded, config-driven experiment runner.
//
//   lwsim <subcommand> [--config FILE] [--seed N] [--threads N] [--out-dir DIR]
//
// Exit status: 0 all checks passed, 1 a tolerance check failed, 2 invalid
// configuration or input, 3 numerical abort.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lwsim/errors.hpp"
#include "lwsim/experiments.hpp"
#include "lwsim/graph.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

using lwsim::Json;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out_dir = ".";
  // graph-gen
  std::vector<std::string> er;
  std::string graph_out;
  // duality
  std::vector<double> theta;
  std::vector<std::string> rho;
};

// Line of the first occurrence of "key" in the config text, or 0.
int LineOf(const std::string& text, const std::string& key) {
  if (key.empty()) return 0;
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class ConfigFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json LoadConfig(const std::string& path, std::string& text) {
  if (path.empty()) return Json::object();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigFileError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  text = buf.str();
  try {
    Json j = Json::parse(text);
    if (!j.is_object()) throw ConfigFileError(path + ":1: config must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    // e.byte is the offset of the error; turn it into a line number.
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ConfigFileError(path + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
}

void WriteOutputs(const std::string& name, const lwsim::ExperimentResult& r,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / (name + ".json"), std::ios::binary);
    out << r.summary.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + (dir / (name + ".json")).string());
  }
  for (const auto& t : r.tables) {
    std::ofstream out(dir / (t.name + ".csv"), std::ios::binary);
    lwsim::WriteCsv(out, t);
    if (!out) throw std::runtime_error("cannot write " + (dir / (t.name + ".csv")).string());
  }
}

int Run(const std::string& command, const Options& opt) {
  std::string text;
  std::string where = opt.config_path.empty() ? "<flags>" : opt.config_path;
  try {
    Json config = LoadConfig(opt.config_path, text);
    lwsim::RunContext ctx;
    if (config.contains("seed")) {
      if (!config["seed"].is_number_unsigned()) {
        throw lwsim::ConfigError("seed", "seed: expected a non-negative integer");
      }
      ctx.seed = config["seed"].get<std::uint64_t>();
      config.erase("seed");
    } else if (!opt.seed) {
      throw lwsim::ConfigError("", "a seed is required (--seed or \"seed\" in the config)");
    }
    if (opt.seed) ctx.seed = *opt.seed;
    ctx.threads = opt.threads > 0 ? opt.threads
                                  : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    if (command == "graph-gen" && !opt.er.empty()) {
      Json g = {{"type", "er"}};
      try {
        g["n"] = std::stoll(opt.er[0]);
        g["p"] = std::stod(opt.er[1]);
      } catch (const std::exception&) {
        throw lwsim::ConfigError("", "--er expects an integer n and a probability p");
      }
      config["graph"] = g;
    }
    if (command == "duality" && (!opt.theta.empty() || !opt.rho.empty())) {
      config["theta"] = opt.theta;
      config["rho"] = opt.rho;
    }

    lwsim::ExperimentResult result;
    std::optional<lwsim::GraphGenResult> graph;
    static const std::map<std::string,
                          std::function<lwsim::ExperimentResult(const Json&, const lwsim::RunContext&)>>
        kRunners = {{"duality", lwsim::RunDuality},
                    {"lwc-test", lwsim::RunLwcTest},
                    {"emp-test", lwsim::RunEmpTest},
                    {"comp-emp-test", lwsim::RunCompEmpTest},
                    {"corr-decay", lwsim::RunCorrDecay},
                    {"tree-counterexample", lwsim::RunTreeCounterexample},
                    {"lattice-test", lwsim::RunLatticeTest},
                    {"ergodicity", lwsim::RunErgodicity}};
    if (command == "graph-gen") {
      graph = lwsim::RunGraphGen(config, ctx);
      result = graph->result;
    } else {
      result = kRunners.at(command)(config, ctx);
    }

    WriteOutputs(command, result, opt.out_dir);
    if (graph) {
      if (opt.graph_out.empty()) {
        lwsim::WriteEdgeList(std::cout, graph->graph, graph->root);
      } else {
        std::ofstream out(opt.graph_out, std::ios::binary);
        lwsim::WriteEdgeList(out, graph->graph, graph->root);
        if (!out) throw std::runtime_error("cannot write " + opt.graph_out);
        std::cout << result.summary.dump(2) << "\n";
      }
    } else {
      std::cout << result.summary.dump(2) << "\n";
    }
    std::cerr << command << ": " << (result.pass ? "PASS" : "FAIL") << "\n";
    return result.pass ? kExitPass : kExitFail;
  } catch (const ConfigFileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lwsim::ConfigError& e) {
    const int line = LineOf(text, e.key());
    std::cerr << "error: " << where;
    if (line > 0) std::cerr << ":" << line;
    std::cerr << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const lwsim::NumericalError& e) {
    std::cerr << "numerical abort at step " << e.step() << ": " << e.what() << "\n";
    return kExitNumerical;
  } catch (const lwsim::InvalidArgument& e) {
    std::cerr << "error: " << where << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const lwsim::SizeLimitError& e) {
    std::cerr << "error: " << where << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local weak convergence experiments for interacting particle systems"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON configuration file");
    sub->add_option("--seed", opt.seed, "Master seed (required unless set in the config)");
    sub->add_option("--threads", opt.threads, "Worker threads; 0 uses all cores")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out-dir", opt.out_dir, "Directory for the JSON summary and CSV curves");
  };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"graph-gen", "Generate a graph and write it as an edge list"},
      {"duality", "Survival probability and the subcritical dual of an offspring law"},
      {"lwc-test", "Ball-histogram distance between finite graphs and their local limit"},
      {"emp-test", "Global empirical measure against the limiting root law"},
      {"comp-emp-test", "Component empirical measures and the giant component"},
      {"corr-decay", "Exact locality and covariance decay between separated regions"},
      {"tree-counterexample", "Finite regular trees against the regular and canopy trees"},
      {"lattice-test", "Lattice boxes against the root law on Z^d"},
      {"ergodicity", "Variance of shift averages over growing boxes"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    if (name == "graph-gen") {
      sub->add_option("--er", opt.er, "Erdos-Renyi G(n, p)")->expected(2)->type_name("N P");
      sub->add_option("--graph-out", opt.graph_out, "Edge-list output file (default: stdout)");
    } else if (name == "duality") {
      sub->add_option("--theta", opt.theta, "Poisson mean(s)");
      sub->add_option("--rho", opt.rho, "Offspring law(s), e.g. weights:0.2,0.3,0.5");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  for (const auto* sub : app.get_subcommands()) return Run(sub->get_name(), opt);
  return kExitConfig;
}
