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

#ifndef LWSIM_ERRORS_HPP_
#define LWSIM_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lwsim {

// Precondition violations on caller-supplied arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured size cap (vertices, state space, search budget) was exceeded.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Iterative numerics or an integrator failed. `step` is the iteration or
// time-step index at which the failure was detected.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::int64_t step)
      : std::runtime_error(what + " (at step " + std::to_string(step) + ")"),
        step_(step) {}

  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

}  // namespace lwsim

#endif  // LWSIM_ERRORS_HPP_
