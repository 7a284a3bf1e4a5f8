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

// Basis labels of a single principal-quantum-number manifold.
//
// Three labelings are used throughout:
//   parabolic  |n, n1, n2, m>   (n1 + n2 + |m| + 1 = n), Stark eigenstates
//   spherical  |n, l, m>        zero-field states, where quantum defects live
//   ladder     |J, mJ>          n1 = 0 states, J = (n-1)/2, m = mJ + J
//
// The parabolic states are products of two commuting spins J1, J2 of size
// j = (n-1)/2 with m = m1 + m2 and n1 - n2 = m1 - m2.
//
// Enumeration orders returned by manifold_basis() are part of the trajectory
// serialization format and must not change:
//   parabolic: m ascending, then n1 ascending
//   spherical: l ascending, then m ascending
//   ladder:    mJ ascending

#pragma once

#include <compare>
#include <cstdlib>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "rydcirc/error.hpp"

namespace rydcirc {

/// Exact half-integer stored as twice its value.
struct HalfInt {
  int twice = 0;

  static constexpr HalfInt from_twice(int t) { return HalfInt{t}; }
  static constexpr HalfInt from_int(int v) { return HalfInt{2 * v}; }

  constexpr double value() const { return 0.5 * twice; }
  constexpr bool is_integer() const { return twice % 2 == 0; }

  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return {a.twice + b.twice}; }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return {a.twice - b.twice}; }
  friend constexpr HalfInt operator-(HalfInt a) { return {-a.twice}; }
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;
};

inline std::ostream& operator<<(std::ostream& os, HalfInt h) {
  if (h.is_integer()) return os << h.twice / 2;
  return os << h.twice << "/2";
}

struct ParabolicState {
  int n = 1;
  int n1 = 0;
  int n2 = 0;
  int m = 0;

  /// Builds |n, n1, m> and derives n2; throws if the labels are inconsistent.
  static ParabolicState make(int n, int n1, int m) {
    const int n2 = n - 1 - std::abs(m) - n1;
    require(n >= 1, "parabolic state needs n >= 1");
    require(n1 >= 0 && n2 >= 0, "parabolic state needs 0 <= n1 <= n - |m| - 1");
    return ParabolicState{n, n1, n2, m};
  }

  bool valid() const {
    return n >= 1 && n1 >= 0 && n2 >= 0 && n1 + n2 + std::abs(m) + 1 == n;
  }
  /// Electric quantum number n1 - n2.
  int k() const { return n1 - n2; }

  friend auto operator<=>(const ParabolicState&, const ParabolicState&) = default;
};

struct SphericalState {
  int n = 1;
  int l = 0;
  int m = 0;

  static SphericalState make(int n, int l, int m) {
    require(n >= 1 && l >= 0 && l < n && std::abs(m) <= l,
            "spherical state needs |m| <= l < n");
    return SphericalState{n, l, m};
  }
  bool valid() const { return n >= 1 && l >= 0 && l < n && std::abs(m) <= l; }

  friend auto operator<=>(const SphericalState&, const SphericalState&) = default;
};

struct SpinLadderState {
  HalfInt J;
  HalfInt mJ;

  static SpinLadderState make(HalfInt J, HalfInt mJ) {
    require(J.twice >= 0, "ladder spin J must be non-negative");
    const int steps = (mJ + J).twice;
    require(steps % 2 == 0 && steps >= 0 && steps <= 2 * J.twice,
            "ladder state needs -J <= mJ <= J with mJ + J integer");
    return SpinLadderState{J, mJ};
  }
  /// Ladder spin of manifold n.
  static HalfInt spin_of_manifold(int n) { return HalfInt::from_twice(n - 1); }

  int n() const { return J.twice + 1; }
  int m() const { return (mJ + J).twice / 2; }
  ParabolicState to_parabolic() const { return ParabolicState::make(n(), 0, m()); }

  static SpinLadderState from_parabolic(const ParabolicState& p) {
    require(p.valid() && p.n1 == 0 && p.m >= 0, "only n1 = 0, m >= 0 states lie on the ladder");
    const HalfInt J = spin_of_manifold(p.n);
    return SpinLadderState{J, HalfInt::from_int(p.m) - J};
  }

  friend auto operator<=>(const SpinLadderState&, const SpinLadderState&) = default;
};

/// Projections (m1, m2) of the two pseudospins of a parabolic state.
struct PseudospinPair {
  HalfInt m1;
  HalfInt m2;
  friend auto operator<=>(const PseudospinPair&, const PseudospinPair&) = default;
};

inline PseudospinPair to_pseudospins(const ParabolicState& p) {
  require(p.valid(), "invalid parabolic state");
  // m1 + m2 = m, m1 - m2 = n1 - n2.
  return {HalfInt::from_twice(p.m + p.k()), HalfInt::from_twice(p.m - p.k())};
}

inline ParabolicState from_pseudospins(int n, PseudospinPair s) {
  const int j2 = n - 1;
  require(std::abs(s.m1.twice) <= j2 && std::abs(s.m2.twice) <= j2 &&
              (s.m1.twice + j2) % 2 == 0 && (s.m2.twice + j2) % 2 == 0,
          "pseudospin projections out of range");
  const int m = (s.m1 + s.m2).twice / 2;
  const int k = (s.m1 - s.m2).twice / 2;
  const int sum = n - 1 - std::abs(m);
  return ParabolicState::make(n, (sum + k) / 2, m);
}

enum class Representation { kParabolic, kSpherical, kLadder };

enum class MSector {
  kAll,          ///< -(n-1) <= m <= n-1
  kNonNegative,  ///< m >= 0 only
};

inline std::vector<ParabolicState> parabolic_basis(int n, MSector sector = MSector::kAll) {
  require(n >= 2, "manifold basis needs n >= 2");
  std::vector<ParabolicState> out;
  const int m_lo = sector == MSector::kAll ? -(n - 1) : 0;
  for (int m = m_lo; m <= n - 1; ++m) {
    for (int n1 = 0; n1 <= n - 1 - std::abs(m); ++n1) out.push_back(ParabolicState::make(n, n1, m));
  }
  return out;
}

inline std::vector<SphericalState> spherical_basis(int n, MSector sector = MSector::kAll) {
  require(n >= 2, "manifold basis needs n >= 2");
  std::vector<SphericalState> out;
  for (int l = 0; l < n; ++l) {
    for (int m = sector == MSector::kAll ? -l : 0; m <= l; ++m) out.push_back({n, l, m});
  }
  return out;
}

inline std::vector<SpinLadderState> ladder_basis(int n) {
  require(n >= 2, "manifold basis needs n >= 2");
  const HalfInt J = SpinLadderState::spin_of_manifold(n);
  std::vector<SpinLadderState> out;
  for (int t = -J.twice; t <= J.twice; t += 2) out.push_back({J, HalfInt::from_twice(t)});
  return out;
}

using BasisLabel = std::variant<ParabolicState, SphericalState, SpinLadderState>;

/// Complete, duplicate-free enumeration of manifold n in the requested labeling.
inline std::vector<BasisLabel> manifold_basis(int n, Representation rep,
                                              MSector sector = MSector::kAll) {
  std::vector<BasisLabel> out;
  switch (rep) {
    case Representation::kParabolic:
      for (const auto& s : parabolic_basis(n, sector)) out.emplace_back(s);
      break;
    case Representation::kSpherical:
      for (const auto& s : spherical_basis(n, sector)) out.emplace_back(s);
      break;
    case Representation::kLadder:
      for (const auto& s : ladder_basis(n)) out.emplace_back(s);
      break;
  }
  return out;
}

inline std::string to_string(const ParabolicState& s) {
  return "|" + std::to_string(s.n) + "," + std::to_string(s.n1) + "," + std::to_string(s.m) + ">";
}

}  // namespace rydcirc
