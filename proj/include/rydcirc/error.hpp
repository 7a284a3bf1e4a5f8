// Copyright 2026 The rydcirc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace rydcirc {

/// Invalid arguments or physically meaningless input.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Norm drift or non-finite values during time propagation.
class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Curve fits or 1-D searches that did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int step = -1)
      : std::runtime_error(what), step_(step) {}
  /// Protocol step index the failure belongs to, or -1.
  int step() const { return step_; }

 private:
  int step_;
};

/// Configuration file problems (unknown keys, missing files, bad units).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace rydcirc
