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

// Named levels of a manifold n:
//   i  = |n,1,2>    i' = |n,3,1>
//   j  = |n,0,3>    k  = |n,0,4>    l = |n,0,5>
//   c  = |n,0,n-1>  (circular)
//   d, e, f, g = |n,0,n-2> ... |n,0,n-5>  (ladder rungs just below c)

#pragma once

#include <array>
#include <string>
#include <string_view>

#include "rydcirc/error.hpp"
#include "rydcirc/manifold/states.hpp"

namespace rydcirc {

enum class NamedLevel { kI, kIPrime, kJ, kK, kL, kC, kD, kE, kF, kG };

/// Trajectory column order.
inline constexpr std::array<NamedLevel, 10> kNamedLevels{
    NamedLevel::kI, NamedLevel::kIPrime, NamedLevel::kJ, NamedLevel::kK, NamedLevel::kL,
    NamedLevel::kC, NamedLevel::kD,      NamedLevel::kE, NamedLevel::kF, NamedLevel::kG};

inline std::string_view name_of(NamedLevel p) {
  switch (p) {
    case NamedLevel::kI: return "i";
    case NamedLevel::kIPrime: return "i'";
    case NamedLevel::kJ: return "j";
    case NamedLevel::kK: return "k";
    case NamedLevel::kL: return "l";
    case NamedLevel::kC: return "c";
    case NamedLevel::kD: return "d";
    case NamedLevel::kE: return "e";
    case NamedLevel::kF: return "f";
    case NamedLevel::kG: return "g";
  }
  return "?";
}

inline NamedLevel named_level_from(std::string_view s) {
  for (auto p : kNamedLevels)
    if (name_of(p) == s) return p;
  if (s == "i_prime" || s == "ip") return NamedLevel::kIPrime;
  throw InvalidArgument("unknown level name '" + std::string(s) + "'");
}

inline ParabolicState resolve(NamedLevel p, int n) {
  require(n >= 7, "named levels need n >= 7");
  switch (p) {
    case NamedLevel::kI: return ParabolicState::make(n, 1, 2);
    case NamedLevel::kIPrime: return ParabolicState::make(n, 3, 1);
    case NamedLevel::kJ: return ParabolicState::make(n, 0, 3);
    case NamedLevel::kK: return ParabolicState::make(n, 0, 4);
    case NamedLevel::kL: return ParabolicState::make(n, 0, 5);
    case NamedLevel::kC: return ParabolicState::make(n, 0, n - 1);
    case NamedLevel::kD: return ParabolicState::make(n, 0, n - 2);
    case NamedLevel::kE: return ParabolicState::make(n, 0, n - 3);
    case NamedLevel::kF: return ParabolicState::make(n, 0, n - 4);
    case NamedLevel::kG: return ParabolicState::make(n, 0, n - 5);
  }
  throw InvalidArgument("unknown named level");
}

}  // namespace rydcirc
