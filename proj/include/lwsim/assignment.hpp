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

// Linear assignment on dense square cost matrices.
#ifndef LWSIM_ASSIGNMENT_HPP_
#define LWSIM_ASSIGNMENT_HPP_

#include <vector>

namespace lwsim {

// Row-major n x n matrix.
struct CostMatrix {
  int n = 0;
  std::vector<double> cost;

  CostMatrix() = default;
  explicit CostMatrix(int size)
      : n(size), cost(static_cast<std::size_t>(size) * size, 0.0) {}
  double& operator()(int i, int j) { return cost[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const {
    return cost[static_cast<std::size_t>(i) * n + j];
  }
};

struct Assignment {
  std::vector<int> column_of_row;
  double value = 0.0;
};

// Minimum-sum perfect assignment (Hungarian method with potentials, O(n^3)).
Assignment MinSumAssignment(const CostMatrix& c);

// Assignment minimising the largest matched cost.
Assignment BottleneckAssignment(const CostMatrix& c);

}  // namespace lwsim

#endif  // LWSIM_ASSIGNMENT_HPP_
