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

namespace lwsim {
namespace {

// Kuhn's augmenting-path matching restricted to entries <= threshold.
bool PerfectMatchingBelow(const CostMatrix& c, double threshold,
                          std::vector<int>& match_col) {
  const int n = c.n;
  std::vector<int> row_of_col(static_cast<std::size_t>(n), -1);
  std::vector<char> visited;
  auto augment = [&](auto&& self, int row) -> bool {
    for (int j = 0; j < n; ++j) {
      if (c(row, j) > threshold || visited[j]) continue;
      visited[j] = 1;
      if (row_of_col[j] < 0 || self(self, row_of_col[j])) {
        row_of_col[j] = row;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < n; ++i) {
    visited.assign(static_cast<std::size_t>(n), 0);
    if (!augment(augment, i)) return false;
  }
  match_col.assign(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < n; ++j) match_col[row_of_col[j]] = j;
  return true;
}

}  // namespace

Assignment MinSumAssignment(const CostMatrix& c) {
  const int n = c.n;
  Assignment result;
  if (n == 0) return result;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-indexed potentials u (rows), v (columns); p[j] = row matched to col j.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  result.column_of_row.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) result.column_of_row[p[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) result.value += c(i, result.column_of_row[i]);
  return result;
}

Assignment BottleneckAssignment(const CostMatrix& c) {
  Assignment result;
  if (c.n == 0) return result;
  std::vector<double> values = c.cost;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::size_t lo = 0;
  std::size_t hi = values.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    std::vector<int> scratch;
    if (PerfectMatchingBelow(c, values[mid], scratch)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  PerfectMatchingBelow(c, values[lo], result.column_of_row);
  result.value = values[lo];
  return result;
}

}  // namespace lwsim
