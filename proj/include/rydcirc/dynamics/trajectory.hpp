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

#include <array>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rydcirc/dynamics/generator.hpp"
#include "rydcirc/dynamics/propagate.hpp"
#include "rydcirc/manifold/named_levels.hpp"

namespace rydcirc {

/// Basis index of each named level, or nullopt when the level is outside the basis.
using LevelMap = std::array<std::optional<Eigen::Index>, kNamedLevels.size()>;

/// Populations of the named levels plus everything else.
struct LevelPopulations {
  std::array<double, kNamedLevels.size()> named{};
  double other = 0.0;

  double operator[](NamedLevel p) const { return named[static_cast<std::size_t>(p)]; }
  double total() const {
    double s = other;
    for (double v : named) s += v;
    return s;
  }
};

inline LevelPopulations populations_of(const CVector& psi, const LevelMap& map) {
  LevelPopulations out;
  double named = 0.0;
  for (std::size_t k = 0; k < map.size(); ++k) {
    if (!map[k]) continue;
    out.named[k] = std::norm(psi(*map[k]));
    named += out.named[k];
  }
  out.other = std::max(0.0, psi.squaredNorm() - named);
  return out;
}

/// Time series of named-level populations; optional full amplitudes.
struct Trajectory {
  std::vector<double> times;  ///< s
  std::vector<LevelPopulations> populations;
  std::vector<CVector> amplitudes;  ///< empty unless requested

  std::vector<double> series(NamedLevel p) const {
    std::vector<double> out;
    out.reserve(populations.size());
    for (const auto& lp : populations) out.push_back(lp[p]);
    return out;
  }
};

inline Trajectory to_trajectory(const Evolution& ev, const LevelMap& map, bool keep_amplitudes = false) {
  Trajectory tr;
  tr.times = ev.times;
  tr.populations.reserve(ev.states.size());
  for (const auto& psi : ev.states) tr.populations.push_back(populations_of(psi, map));
  if (keep_amplitudes) tr.amplitudes = ev.states;
  return tr;
}

/// Propagate and reduce to named-level populations.
inline Trajectory propagate_trajectory(const Generator& gen, const CVector& psi0,
                                       const std::vector<double>& grid, const LevelMap& map,
                                       const PropagateOptions& opt = {}, bool keep_amplitudes = false) {
  return to_trajectory(propagate(gen, psi0, grid, opt), map, keep_amplitudes);
}

/// CSV: time_us, one column per named level, then "other".
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "time_us";
  for (auto p : kNamedLevels) os << ',' << name_of(p);
  os << ",other\n";
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << std::setprecision(10);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    os << tr.times[k] * 1e6;
    for (double v : tr.populations[k].named) os << ',' << v;
    os << ',' << tr.populations[k].other << '\n';
  }
  os.flags(old_flags);
  os.precision(old_prec);
}

inline std::vector<double> uniform_grid(double t0, double t1, std::size_t count) {
  require(count >= 2 && t1 > t0, "uniform grid needs count >= 2 and t1 > t0");
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k)
    g[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(count - 1);
  return g;
}

}  // namespace rydcirc
