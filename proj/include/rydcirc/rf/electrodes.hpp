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

// Four ring electrodes and the linear map from their rf drives to the
// circular field components at the centre.
//
// An electrode at azimuth theta driven with complex amplitude A produces a
// linear field along (cos theta, sin theta); its circular parts are
//   E+ = A e^{-i theta} / 2,   E- = A e^{+i theta} / 2,
// which is the ideal transfer matrix. Opposite electrodes therefore add in
// antiphase and cancel in phase.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rydcirc/constants.hpp"
#include "rydcirc/error.hpp"

namespace rydcirc {

using cplx = std::complex<double>;

inline double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

struct ElectrodeDrive {
  std::array<double, 4> amplitude{0.0, 0.0, 0.0, 0.0};  ///< arbitrary units, >= 0
  std::array<double, 4> phase{0.0, 0.0, 0.0, 0.0};      ///< rad in [0, 2 pi)

  static ElectrodeDrive uniform(double v = 1.0) {
    ElectrodeDrive d;
    d.amplitude.fill(v);
    return d;
  }

  /// Only electrode k (0-based) on.
  ElectrodeDrive only(std::size_t k) const {
    ElectrodeDrive d;
    d.amplitude[k] = amplitude[k];
    d.phase = phase;
    return d;
  }
  /// Only electrodes a and b on.
  ElectrodeDrive only(std::size_t a, std::size_t b) const {
    ElectrodeDrive d;
    d.amplitude[a] = amplitude[a];
    d.amplitude[b] = amplitude[b];
    d.phase = phase;
    return d;
  }

  void set_phase(std::size_t k, double phi) { phase[k] = wrap_phase(phi); }

  void validate() const {
    for (std::size_t k = 0; k < 4; ++k) {
      require(std::isfinite(amplitude[k]) && amplitude[k] >= 0, "electrode amplitudes must be >= 0");
      require(std::isfinite(phase[k]) && phase[k] >= 0 && phase[k] < kTwoPi,
              "electrode phases must lie in [0, 2 pi)");
    }
  }

  Eigen::Vector4cd complex_amplitudes() const {
    Eigen::Vector4cd v;
    for (int k = 0; k < 4; ++k) v(k) = std::polar(amplitude[static_cast<std::size_t>(k)], phase[static_cast<std::size_t>(k)]);
    return v;
  }
};

struct TransferMatrix {
  Eigen::Matrix<cplx, 2, 4> t = Eigen::Matrix<cplx, 2, 4>::Zero();  ///< rows: E+, E- (V/m per unit drive)
  Eigen::Matrix4cd crosstalk = Eigen::Matrix4cd::Identity();

  /// Unit electrodes at azimuths 0, pi/2, pi, 3pi/2.
  static TransferMatrix ideal(double scale = 1.0) {
    TransferMatrix m;
    for (int k = 0; k < 4; ++k) {
      const double theta = k * kPi / 2.0;
      m.t(0, k) = 0.5 * scale * std::polar(1.0, -theta);
      m.t(1, k) = 0.5 * scale * std::polar(1.0, theta);
    }
    return m;
  }

  Eigen::Matrix<cplx, 2, 4> effective() const { return t * crosstalk; }

  void validate() const {
    require(t.allFinite() && crosstalk.allFinite(), "transfer matrix entries must be finite");
  }
};

struct CircularField {
  cplx e_plus;
  cplx e_minus;
};

/// (E+, E-) at the centre for complex drive vectors (linear superposition).
inline CircularField field_at_center(const Eigen::Vector4cd& v, const TransferMatrix& tm) {
  const Eigen::Vector2cd e = tm.effective() * v;
  return {e(0), e(1)};
}

/// (E+, E-) at the centre for a drive set.
inline CircularField field_at_center(const ElectrodeDrive& drives, const TransferMatrix& tm) {
  return field_at_center(drives.complex_amplitudes(), tm);
}

/// Omega = 2 pi sqrt(2) d |E| / h, rad/s; d in C m.
inline double rabi_from_field(cplx e, double dipole) {
  require(dipole > 0, "dipole moment must be positive");
  return kTwoPi * std::sqrt(2.0) * dipole * std::abs(e) / constants().h;
}

/// Field magnitude (V/m) giving Rabi angular frequency omega.
inline double field_from_rabi(double omega, double dipole) {
  require(dipole > 0, "dipole moment must be positive");
  return omega * constants().h / (kTwoPi * std::sqrt(2.0) * dipole);
}

struct RabiPair {
  double omega_plus = 0.0;
  double omega_minus = 0.0;
};

inline RabiPair rabi_from_fields(const CircularField& f, double dipole) {
  return {rabi_from_field(f.e_plus, dipole), rabi_from_field(f.e_minus, dipole)};
}

/// |E-| / sqrt(|E+|^2 + |E-|^2).
inline double purity(double e_plus, double e_minus) {
  const double a = std::abs(e_plus);
  const double b = std::abs(e_minus);
  require(a > 0 || b > 0, "purity undefined for a zero field");
  return b / std::hypot(a, b);
}
inline double purity(const CircularField& f) { return purity(std::abs(f.e_plus), std::abs(f.e_minus)); }

inline ElectrodeDrive global_scale(const ElectrodeDrive& d, double factor) {
  require(factor >= 0 && std::isfinite(factor), "scale factor must be >= 0");
  ElectrodeDrive out = d;
  for (double& v : out.amplitude) v *= factor;
  return out;
}

// Plain-text tables.
//
// Transfer matrix: rows "E+" and "E-" with four "re im" pairs each, optionally
// four rows "X1".."X4" of the cross-talk matrix in the same format.
// Drives: one row per electrode "<index 1..4> <amplitude> <phase_rad>".

inline void write_transfer_matrix(std::ostream& os, const TransferMatrix& tm) {
  os << std::setprecision(17);
  auto row = [&](const char* name, auto r) {
    os << name;
    for (int k = 0; k < 4; ++k) os << ' ' << r(k).real() << ' ' << r(k).imag();
    os << '\n';
  };
  row("E+", tm.t.row(0));
  row("E-", tm.t.row(1));
  if (!tm.crosstalk.isIdentity(0.0)) {
    for (int r = 0; r < 4; ++r) row(("X" + std::to_string(r + 1)).c_str(), tm.crosstalk.row(r));
  }
}

inline TransferMatrix read_transfer_matrix(std::istream& in) {
  TransferMatrix tm;
  std::string line;
  bool seen_plus = false;
  bool seen_minus = false;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    std::array<cplx, 4> v;
    for (auto& z : v) {
      double re = 0, im = 0;
      if (!(ls >> re >> im)) throw ConfigError("transfer matrix row '" + name + "' needs 4 re/im pairs");
      z = {re, im};
    }
    auto put = [&](auto r) {
      for (int k = 0; k < 4; ++k) r(k) = v[static_cast<std::size_t>(k)];
    };
    if (name == "E+") {
      put(tm.t.row(0));
      seen_plus = true;
    } else if (name == "E-") {
      put(tm.t.row(1));
      seen_minus = true;
    } else if (name.size() == 2 && name[0] == 'X' && name[1] >= '1' && name[1] <= '4') {
      put(tm.crosstalk.row(name[1] - '1'));
    } else {
      throw ConfigError("unknown transfer matrix row '" + name + "'");
    }
  }
  if (!seen_plus || !seen_minus) throw ConfigError("transfer matrix needs both E+ and E- rows");
  try {
    tm.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return tm;
}

inline void write_drives(std::ostream& os, const ElectrodeDrive& d) {
  os << std::setprecision(17);
  for (std::size_t k = 0; k < 4; ++k) os << k + 1 << ' ' << d.amplitude[k] << ' ' << d.phase[k] << '\n';
}

inline ElectrodeDrive read_drives(std::istream& in) {
  ElectrodeDrive d;
  std::array<bool, 4> seen{};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    int k = 0;
    double v = 0, phi = 0;
    if (!(ls >> k)) continue;
    if (!(ls >> v >> phi) || k < 1 || k > 4) throw ConfigError("bad drive row: '" + line + "'");
    d.amplitude[static_cast<std::size_t>(k - 1)] = v;
    d.phase[static_cast<std::size_t>(k - 1)] = wrap_phase(phi);
    seen[static_cast<std::size_t>(k - 1)] = true;
  }
  for (bool s : seen)
    if (!s) throw ConfigError("drive table needs rows for electrodes 1..4");
  try {
    d.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return d;
}

}  // namespace rydcirc
