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

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace lwsim {
namespace {

std::string ErrorKey(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

TEST(MergeConfigTest, RecursiveMergeReplaceAndDelete) {
  const Json defaults = {{"model", {{"name", "voter"}, {"params", {{"a", 1}}}}},
                         {"giant", {{"n", 10}, {"tol", 0.1}}},
                         {"sizes", {1, 2}},
                         {"z", 3}};
  const Json user = {{"model", {{"name", "noisy_majority"}}},
                     {"giant", {{"tol", 0.2}}},
                     {"sizes", {5}},
                     {"z", nullptr}};
  const Json merged = MergeConfig(defaults, user);
  EXPECT_EQ(merged["model"], (Json{{"name", "noisy_majority"}}));
  EXPECT_EQ(merged["giant"], (Json{{"n", 10}, {"tol", 0.2}}));
  EXPECT_EQ(merged["sizes"], Json::array({5}));
  EXPECT_FALSE(merged.contains("z"));
}

TEST(ConfigSectionTest, StrictKeysAndTypes) {
  const Json j = {{"n", 5}, {"x", 1.5}, {"name", "er"}, {"list", {1, 2}}, {"typo", 1}};
  const ConfigSection s(j, "");
  EXPECT_EQ(s.Integer("n"), 5);
  EXPECT_EQ(s.Number("x"), 1.5);
  EXPECT_EQ(s.String("name"), "er");
  EXPECT_EQ(s.Integers("list"), (std::vector<int>{1, 2}));
  EXPECT_EQ(s.Number("missing", 4.0), 4.0);
  EXPECT_EQ(ErrorKey([&] { s.Finish(); }), "typo");
  EXPECT_EQ(ErrorKey([&] { s.Integer("x"); }), "x");
  EXPECT_EQ(ErrorKey([&] { s.String("n"); }), "n");
  EXPECT_EQ(ErrorKey([&] { s.Number("absent"); }), "absent");
}

TEST(ParserTest, ModelsAndHorizons) {
  const Json bad_param = {{"name", "noisy_majority"}, {"params", {{"eps", 0.1}}}};
  EXPECT_THROW(ParseModel(ConfigSection(bad_param, "model")), ConfigError);
  const Json sde = {{"name", "consensus_sde"}, {"params", {{"sigma", 0.5}}}};
  const Model m = ParseModel(ConfigSection(sde, "model"));
  const Json h = {{"t", 1.0}, {"dt", 0.01}};
  EXPECT_EQ(ParseHorizon(ConfigSection(h, "horizon"), m).steps, 100);
  const Json wrong = {{"k", 3}};
  EXPECT_THROW(ParseHorizon(ConfigSection(wrong, "horizon"), m), ConfigError);
  const Json fam = {{"type", "er"}, {"c", 2.0}};
  const GraphFamily f = ParseGraphFamily(ConfigSection(fam, "graph"));
  EXPECT_NEAR(f.LimitLaw(1000).Mean(), 2.0, 1e-9);
  EXPECT_EQ(f.Make(100, 1).num_vertices(), 100);
}

TEST(RunnerTest, UnknownKeysAreRejected) {
  const RunContext ctx{1, 1};
  EXPECT_EQ(ErrorKey([&] { RunEmpTest({{"sizez", {10}}}, ctx); }), "sizez");
  EXPECT_THROW(DefaultConfig("nope"), ConfigError);
}

TEST(RunnerTest, SummariesIndependentOfThreadCount) {
  const Json config = {{"sizes", {200, 400}}, {"limit_replicas", 2000}, {"w1_samples", 64}};
  const ExperimentResult a = RunEmpTest(config, {17, 1});
  const ExperimentResult b = RunEmpTest(config, {17, 3});
  EXPECT_EQ(a.summary.dump(), b.summary.dump());
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    std::ostringstream ca, cb;
    WriteCsv(ca, a.tables[i]);
    WriteCsv(cb, b.tables[i]);
    EXPECT_EQ(ca.str(), cb.str());
  }
  EXPECT_EQ(a.summary["seed"], 17);
  EXPECT_EQ(a.summary["experiment"], "emp-test");
}

TEST(RunnerTest, GraphGenAndDuality) {
  const GraphGenResult g =
      RunGraphGen({{"graph", {{"type", "er"}, {"n", 50}, {"p", 0.1}}}}, {3, 1});
  EXPECT_EQ(g.graph.num_vertices(), 50);
  EXPECT_EQ(g.graph, GenErdosRenyi(50, 0.1, 3));
  const ExperimentResult d = RunDuality({{"theta", {2.0}}}, {1, 1});
  EXPECT_TRUE(d.pass);
}

TEST(RunnerTest, IntegratorCheckPasses) {
  const ExperimentResult r = RunIntegratorCheck(Json::object(), {1, 1});
  EXPECT_TRUE(r.pass) << r.summary.dump(2);
}

TEST(CsvTest, NanIsEmptyCell) {
  CsvTable t;
  t.rows = {{1.0, 0.25, std::numeric_limits<double>::quiet_NaN()}};
  std::ostringstream out;
  WriteCsv(out, t);
  EXPECT_EQ(out.str(), "x,value,ci\n1,0.25,\n");
}

}  // namespace
}  // namespace lwsim
