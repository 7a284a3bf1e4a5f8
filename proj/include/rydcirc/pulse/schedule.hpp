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

// Piecewise-constant rf schedules and their transfer fidelity.

#pragma once

#include <cmath>
#include <iomanip>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rydcirc/constants.hpp"
#include "rydcirc/dynamics/control.hpp"
#include "rydcirc/dynamics/propagate.hpp"
#include "rydcirc/error.hpp"

namespace rydcirc {

struct ScheduleBounds {
  double omega_max = kTwoPi * 10e6;  ///< rad/s; Omega in [0, omega_max]
  double delta_max = kTwoPi * 20e6;  ///< rad/s; delta in [-delta_max, delta_max]
  double time_budget = 400e-9;       ///< s, upper bound on the total duration
  double min_duration = 1e-9;        ///< s, per segment when durations are free

  void validate() const {
    require(omega_max > 0 && std::isfinite(omega_max), "omega_max must be positive");
    require(delta_max >= 0 && std::isfinite(delta_max), "delta_max must be non-negative");
    require(time_budget > 0 && std::isfinite(time_budget), "time budget must be positive");
    require(min_duration > 0, "minimum segment duration must be positive");
  }
};

struct PulseSchedule {
  std::vector<double> duration;  ///< s
  std::vector<double> omega;     ///< rad/s
  std::vector<double> delta;     ///< rad/s
  std::vector<double> phase;     ///< rad; empty means 0 on every segment
  ScheduleBounds bounds{};

  std::size_t size() const { return duration.size(); }
  double total_duration() const { return std::accumulate(duration.begin(), duration.end(), 0.0); }
  double phase_of(std::size_t k) const { return phase.empty() ? 0.0 : phase[k]; }

  /// Equal segments filling the budget.
  static PulseSchedule uniform(std::size_t segments, double omega, double delta, ScheduleBounds b) {
    require(segments >= 1, "a schedule needs at least one segment");
    PulseSchedule s;
    s.bounds = b;
    s.duration.assign(segments, b.time_budget / static_cast<double>(segments));
    s.omega.assign(segments, omega);
    s.delta.assign(segments, delta);
    return s;
  }

  /// One segment of the given length.
  static PulseSchedule single(double duration, double omega, double delta, ScheduleBounds b) {
    b.time_budget = std::max(b.time_budget, duration);
    PulseSchedule s = uniform(1, omega, delta, b);
    s.duration[0] = duration;
    return s;
  }

  /// Uniform random controls within bounds, equal durations.
  static PulseSchedule random(std::size_t segments, ScheduleBounds b, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PulseSchedule s = uniform(segments, 0.0, 0.0, b);
    for (std::size_t k = 0; k < segments; ++k) {
      s.omega[k] = b.omega_max * u(rng);
      s.delta[k] = b.delta_max * (2.0 * u(rng) - 1.0);
    }
    return s;
  }

  void validate() const {
    bounds.validate();
    require(!duration.empty(), "a schedule needs at least one segment");
    require(omega.size() == size() && delta.size() == size(), "schedule columns differ in length");
    require(phase.empty() || phase.size() == size(), "phase column length differs");
    const double tol = 1e-12;
    for (std::size_t k = 0; k < size(); ++k) {
      require(duration[k] > 0 && std::isfinite(duration[k]), "segment durations must be positive");
      require(omega[k] >= -tol * bounds.omega_max && omega[k] <= bounds.omega_max * (1 + tol),
              "segment amplitude outside [0, omega_max]");
      require(std::abs(delta[k]) <= bounds.delta_max * (1 + tol) + tol,
              "segment detuning outside [-delta_max, delta_max]");
    }
    require(total_duration() <= bounds.time_budget * (1 + 1e-9), "schedule exceeds the time budget");
  }
};

/// U(schedule) |initial>, segment by segment through the propagator.
inline CVector evolve_schedule(const PulseSchedule& s, std::shared_ptr<const ControlSystem> sys,
                               const PropagateOptions& opt = {}) {
  s.validate();
  CVector psi = basis_state(sys->dim(), sys->initial);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const ControlGenerator gen(sys, s.omega[k], s.delta[k], s.phase_of(k));
    psi = propagate_to(gen, psi, 0.0, s.duration[k], opt);
  }
  return psi;
}

/// |<target| U(schedule) |initial>|^2.
inline double fidelity(const PulseSchedule& s, std::shared_ptr<const ControlSystem> sys,
                       const PropagateOptions& opt = {}) {
  const CVector psi = evolve_schedule(s, sys, opt);
  const double f = std::norm(psi(sys->target));
  if (!std::isfinite(f)) throw PropagationError("non-finite fidelity");
  return std::min(1.0, f);
}

// CSV: segment,duration_ns,omega_over_2pi_MHz,delta_over_2pi_MHz

inline void write_schedule_csv(std::ostream& os, const PulseSchedule& s) {
  os << "segment,duration_ns,omega_over_2pi_MHz,delta_over_2pi_MHz\n" << std::setprecision(15);
  for (std::size_t k = 0; k < s.size(); ++k)
    os << k << ',' << s.duration[k] * 1e9 << ',' << s.omega[k] / (kTwoPi * 1e6) << ','
       << s.delta[k] / (kTwoPi * 1e6) << '\n';
}

/// Reads a schedule CSV; the bounds are taken from `b` and checked.
inline PulseSchedule read_schedule_csv(std::istream& in, ScheduleBounds b) {
  PulseSchedule s;
  s.bounds = b;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("segment,duration_ns,omega_over_2pi_MHz,delta_over_2pi_MHz", 0) != 0)
        throw ConfigError("schedule CSV header must be segment,duration_ns,omega_over_2pi_MHz,delta_over_2pi_MHz");
      header = true;
      continue;
    }
    std::istringstream ls(line);
    std::string f[4];
    for (auto& x : f)
      if (!std::getline(ls, x, ',')) throw ConfigError("schedule row needs four columns: '" + line + "'");
    try {
      if (std::stoul(f[0]) != s.size()) throw ConfigError("schedule segments must be numbered 0, 1, ...");
      s.duration.push_back(std::stod(f[1]) * 1e-9);
      s.omega.push_back(std::stod(f[2]) * kTwoPi * 1e6);
      s.delta.push_back(std::stod(f[3]) * kTwoPi * 1e6);
    } catch (const std::logic_error&) {
      throw ConfigError("bad number in schedule row: '" + line + "'");
    }
  }
  if (!header || s.size() == 0) throw ConfigError("schedule CSV has no segments");
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("schedule violates its bounds: ") + e.what());
  }
  return s;
}

}  // namespace rydcirc
