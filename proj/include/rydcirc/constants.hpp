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

#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>

namespace rydcirc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// CODATA 2018 values (exact SI definitions where applicable).
struct PhysicalConstants {
  double e = 1.602176634e-19;        ///< elementary charge, C
  double a0 = 5.29177210903e-11;     ///< Bohr radius, m
  double h = 6.62607015e-34;         ///< Planck constant, J s
  double hbar = 6.62607015e-34 / kTwoPi;
  double rydberg_hz = 3.2898419602508e15;  ///< R_inf * c, Hz
  double electron_mass_u = 5.48579909065e-4;
  double atomic_unit_field = 5.14220674763e11;  ///< E_h / (e a0), V/m

  /// e*a0/h in Hz per (V/m).
  double dipole_hz_per_v_per_m() const { return e * a0 / h; }
};

inline const PhysicalConstants& constants() {
  static const PhysicalConstants c{};
  return c;
}

/// Mass-corrected Rydberg frequency for 85Rb, Hz.
inline double rubidium85_rydberg_hz() {
  constexpr double kMass85 = 84.911789738;  // u
  const auto& c = constants();
  return c.rydberg_hz / (1.0 + c.electron_mass_u / kMass85);
}

/// Stable FNV-1a hash of the printed constant set; reported by `--version`.
inline std::uint64_t constants_hash() {
  const auto& c = constants();
  std::ostringstream os;
  os.precision(17);
  os << c.e << ' ' << c.a0 << ' ' << c.h << ' ' << c.hbar << ' ' << c.rydberg_hz << ' '
     << c.electron_mass_u << ' ' << c.atomic_unit_field << ' ' << rubidium85_rydberg_hz();
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char ch : os.str()) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

namespace units {
inline constexpr double kVPerCm = 100.0;  // V/m
inline constexpr double kMHz = 1e6;
inline constexpr double kKHz = 1e3;
inline constexpr double kUs = 1e-6;
inline constexpr double kNs = 1e-9;
/// Angular frequency (rad/s) from a cyclic frequency in MHz.
inline constexpr double mhz_to_rad(double mhz) { return kTwoPi * mhz * kMHz; }
inline constexpr double rad_to_mhz(double rad_s) { return rad_s / (kTwoPi * kMHz); }
}  // namespace units

}  // namespace rydcirc
