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


#include "lwsim/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "lwsim/random.hpp"

namespace lwsim {
namespace {

struct Brute {
  double sum;
  double bottleneck;
};

Brute BruteForce(const CostMatrix& c) {
  std::vector<int> perm(c.n);
  std::iota(perm.begin(), perm.end(), 0);
  Brute best{std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
  do {
    double s = 0.0, b = 0.0;
    for (int i = 0; i < c.n; ++i) {
      s += c(i, perm[i]);
      b = std::max(b, c(i, perm[i]));
    }
    best.sum = std::min(best.sum, s);
    best.bottleneck = std::min(best.bottleneck, b);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool IsPermutation(std::vector<int> p) {
  std::sort(p.begin(), p.end());
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (p[i] != i) return false;
  }
  return true;
}

TEST(AssignmentTest, HandExample) {
  CostMatrix c(3);
  const double v[] = {4, 1, 3, 2, 0, 5, 3, 2, 2};
  std::copy(std::begin(v), std::end(v), c.cost.begin());
  const Assignment a = MinSumAssignment(c);
  EXPECT_DOUBLE_EQ(a.value, 5.0);
  EXPECT_EQ(a.column_of_row, (std::vector<int>{1, 0, 2}));
}

TEST(AssignmentTest, MatchesBruteForceOnRandomMatrices) {
  CounterRng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.UniformInt(7));
    CostMatrix c(n);
    for (double& x : c.cost) {
      // Integer costs produce many ties, which stress the solvers.
      x = trial % 2 == 0 ? rng.Uniform() : static_cast<double>(rng.UniformInt(4));
    }
    const Brute brute = BruteForce(c);
    const Assignment sum = MinSumAssignment(c);
    const Assignment bot = BottleneckAssignment(c);
    ASSERT_TRUE(IsPermutation(sum.column_of_row));
    ASSERT_TRUE(IsPermutation(bot.column_of_row));
    EXPECT_NEAR(sum.value, brute.sum, 1e-12);
    EXPECT_NEAR(bot.value, brute.bottleneck, 1e-12);
  }
}

TEST(AssignmentTest, EmptyMatrix) {
  const Assignment a = MinSumAssignment(CostMatrix(0));
  EXPECT_TRUE(a.column_of_row.empty());
  EXPECT_EQ(a.value, 0.0);
}

}  // namespace
}  // namespace lwsim
