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

// Small statistics helpers shared by the experiments.
#ifndef LWSIM_STATS_HPP_
#define LWSIM_STATS_HPP_

#include <span>

namespace lwsim {

double Mean(std::span<const double> x);
// Unbiased sample variance; zero for fewer than two points.
double SampleVariance(std::span<const double> x);
// Standard error of the mean.
double StandardError(std::span<const double> x);

// Two-sample Kolmogorov-Smirnov statistic sup_t |F_a(t) - F_b(t)|.
double KolmogorovSmirnov(std::span<const double> a, std::span<const double> b);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
LinearFit FitLine(std::span<const double> x, std::span<const double> y);

}  // namespace lwsim

#endif  // LWSIM_STATS_HPP_
