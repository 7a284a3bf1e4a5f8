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

// Sequential polarization calibration of the four-electrode rf drive.
//
// The only observable is the Rabi frequency of the sigma- transition i -> i'.
// With the static field along +z it measures the sigma- amplitude; reversing
// the field swaps the roles of E+ and E-, so the same transition measures E+.
//
// Steps (electrodes 1..4, pairs 1-3 and 2-4):
//   1  measure the sigma+ Rabi frequency of each electrode alone
//   2  match amplitudes within each pair (V3 to V1, V4 to V2)
//   3  set the phase of electrode 3 (4) maximizing the sigma+ of its pair
//   4  scale pair 2-4 so both pairs give the same sigma-
//   5  shift the phase of pair 2-4 minimizing the global sigma-

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "rydcirc/error.hpp"
#include "rydcirc/rf/electrodes.hpp"
#include "rydcirc/util/parallel.hpp"

namespace rydcirc {

enum class FieldOrientation { kPlusZ, kMinusZ };

struct PolarizationMeasurement {
  double omega_minus = 0.0;  ///< rad/s
  double omega_plus = 0.0;   ///< rad/s
  double uncertainty = 0.0;  ///< rad/s, per measurement
};

/// Measures the i -> i' sigma- Rabi frequency for a drive set.
class PolarizationOracle {
 public:
  virtual ~PolarizationOracle() = default;
  virtual double measure(const ElectrodeDrive& drives, FieldOrientation orientation) = 0;
  virtual double uncertainty(double value) const { return 0.0 * value; }

  PolarizationMeasurement measure_both(const ElectrodeDrive& drives) {
    PolarizationMeasurement m;
    m.omega_minus = measure(drives, FieldOrientation::kPlusZ);
    m.omega_plus = measure(drives, FieldOrientation::kMinusZ);
    m.uncertainty = std::max(uncertainty(m.omega_minus), uncertainty(m.omega_plus));
    return m;
  }
};

/// Transfer matrix + dipole moment, with multiplicative Gaussian noise.
class SimulatedOracle final : public PolarizationOracle {
 public:
  SimulatedOracle(TransferMatrix tm, double dipole, double relative_noise = 0.0,
                  std::uint64_t seed = 1)
      : tm_(std::move(tm)), dipole_(dipole), noise_(relative_noise), rng_(seed) {
    tm_.validate();
    require(dipole > 0, "dipole moment must be positive");
    require(relative_noise >= 0, "noise level must be non-negative");
  }

  double measure(const ElectrodeDrive& drives, FieldOrientation orientation) override {
    ++count_;
    const auto f = field_at_center(drives, tm_);
    // Field reversal: the sigma- transition then probes the sigma+ amplitude.
    const cplx e = orientation == FieldOrientation::kPlusZ ? f.e_minus : f.e_plus;
    double omega = rabi_from_field(e, dipole_);
    if (noise_ > 0) omega *= 1.0 + noise_ * normal_(rng_);
    return std::max(0.0, omega);
  }

  double uncertainty(double value) const override { return noise_ * value; }
  std::size_t count() const { return count_; }
  const TransferMatrix& transfer_matrix() const { return tm_; }

 private:
  TransferMatrix tm_;
  double dipole_;
  double noise_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::size_t count_ = 0;
};

struct AuditRecord {
  int step = 0;
  std::string parameter;
  double value = 0.0;
  double omega_plus = 0.0;   ///< rad/s
  double omega_minus = 0.0;  ///< rad/s
};

struct PolarizationResult {
  ElectrodeDrive drives;
  std::vector<AuditRecord> audit;
  /// Global sigma-/sigma+ measurement of the drive set after steps 3, 4, 5 of each pass.
  std::vector<PolarizationMeasurement> checkpoints;
  int passes = 0;
};

struct PolarizationOptions {
  int passes = 1;
  double phase_tolerance = 1e-12;  ///< rad, golden-section bracket width
  int coarse_points = 16;          ///< bracketing samples on [0, 2 pi)
  int max_iterations = 200;
};

/// Golden-section minimization of a unimodal f on [a, b]; throws ConvergenceError(step).
inline double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                      double tol, int max_iter, int step) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter; ++it) {
    if (!std::isfinite(fc) || !std::isfinite(fd))
      throw ConvergenceError("non-finite measurement in 1-D search", step);
    if (b - a <= tol) return 0.5 * (a + b);
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (b - a <= tol) return 0.5 * (a + b);
  throw ConvergenceError("1-D search did not reach tolerance", step);
}

/// Periodic phase search: coarse sampling on [0, 2 pi), then golden-section around the best sample.
inline double minimize_phase(const std::function<double(double)>& f, const PolarizationOptions& opt,
                             int step) {
  require(opt.coarse_points >= 3, "coarse_points must be >= 3");
  const double h = kTwoPi / opt.coarse_points;
  int best = 0;
  double fbest = f(0.0);
  for (int k = 1; k < opt.coarse_points; ++k) {
    const double v = f(k * h);
    if (v < fbest) {
      fbest = v;
      best = k;
    }
  }
  if (!std::isfinite(fbest)) throw ConvergenceError("non-finite measurement in 1-D search", step);
  return wrap_phase(golden_section_minimize(f, best * h - h, best * h + h, opt.phase_tolerance,
                                            opt.max_iterations, step));
}

/// Runs the calibration from `start` against `oracle`.
inline PolarizationResult optimize_polarization(PolarizationOracle& oracle, ElectrodeDrive start,
                                                const PolarizationOptions& opt = {}) {
  start.validate();
  require(opt.passes >= 1, "at least one pass is required");
  PolarizationResult res;
  ElectrodeDrive d = start;
  auto log = [&](int step, const std::string& p, double v, const ElectrodeDrive& probe) {
    const auto m = oracle.measure_both(probe);
    res.audit.push_back({step, p, v, m.omega_plus, m.omega_minus});
    return m;
  };
  const std::array<std::array<std::size_t, 2>, 2> pairs{{{0, 2}, {1, 3}}};

  for (int pass = 0; pass < opt.passes; ++pass) {
    // 1: sigma+ of each electrode alone.
    std::array<double, 4> wp{};
    for (std::size_t k = 0; k < 4; ++k) {
      wp[k] = log(1, "V" + std::to_string(k + 1), d.amplitude[k], d.only(k)).omega_plus;
      if (!(wp[k] > 0)) throw ConvergenceError("electrode " + std::to_string(k + 1) + " gives no sigma+ signal", 1);
    }
    // 2: amplitude matching within pairs.
    for (const auto& pr : pairs) {
      d.amplitude[pr[1]] *= wp[pr[0]] / wp[pr[1]];
      log(2, "V" + std::to_string(pr[1] + 1), d.amplitude[pr[1]], d.only(pr[1]));
    }
    // 3: intra-pair phase maximizing the pair's sigma+.
    for (const auto& pr : pairs) {
      const std::size_t k = pr[1];
      auto f = [&](double phi) {
        ElectrodeDrive probe = d.only(pr[0], pr[1]);
        probe.set_phase(k, phi);
        return -oracle.measure(probe, FieldOrientation::kMinusZ);
      };
      d.set_phase(k, minimize_phase(f, opt, 3));
      log(3, "phi" + std::to_string(k + 1), d.phase[k], d.only(pr[0], pr[1]));
    }
    res.checkpoints.push_back(oracle.measure_both(d));
    // 4: equalize the pair sigma- amplitudes by scaling pair 2-4.
    const double wa = oracle.measure(d.only(0, 2), FieldOrientation::kPlusZ);
    const double wb = oracle.measure(d.only(1, 3), FieldOrientation::kPlusZ);
    if (!(wa > 0) || !(wb > 0) || !std::isfinite(wa / wb))
      throw ConvergenceError("pair sigma- signal vanished; cannot equalize", 4);
    const double s = wa / wb;
    d.amplitude[1] *= s;
    d.amplitude[3] *= s;
    log(4, "scale24", s, d);
    res.checkpoints.push_back(oracle.measure_both(d));
    // 5: inter-pair phase minimizing the global sigma-.
    const ElectrodeDrive base = d;
    auto g = [&](double psi) {
      ElectrodeDrive probe = base;
      probe.set_phase(1, base.phase[1] + psi);
      probe.set_phase(3, base.phase[3] + psi);
      return oracle.measure(probe, FieldOrientation::kPlusZ);
    };
    const double psi = minimize_phase(g, opt, 5);
    d.set_phase(1, base.phase[1] + psi);
    d.set_phase(3, base.phase[3] + psi);
    log(5, "psi24", psi, d);
    res.checkpoints.push_back(oracle.measure_both(d));
    ++res.passes;
  }
  res.drives = d;
  return res;
}

/// Line-oriented audit log: step parameter value omega_plus_MHz omega_minus_MHz.
inline void write_audit_log(std::ostream& os, const std::vector<AuditRecord>& log) {
  os << "# step parameter value omega_plus_over_2pi_MHz omega_minus_over_2pi_MHz\n";
  os << std::setprecision(12);
  for (const auto& r : log)
    os << r.step << ' ' << r.parameter << ' ' << r.value << ' ' << r.omega_plus / (kTwoPi * 1e6)
       << ' ' << r.omega_minus / (kTwoPi * 1e6) << '\n';
}

/// Random per-entry amplitude and phase imbalances of a transfer matrix.
inline TransferMatrix perturb_transfer_matrix(const TransferMatrix& tm, double amplitude_spread,
                                              double phase_spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TransferMatrix out = tm;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c)
      out.t(r, c) *= (1.0 + amplitude_spread * u(rng)) * std::polar(1.0, phase_spread * u(rng));
  return out;
}

/// True purity reached by `runs` independent noisy calibrations (seeds seed, seed+1, ...).
inline std::vector<double> polarization_monte_carlo(const TransferMatrix& tm, double dipole,
                                                    double relative_noise, std::size_t runs,
                                                    std::uint64_t seed, const ElectrodeDrive& start,
                                                    const PolarizationOptions& opt = {},
                                                    unsigned workers = 1) {
  return parallel_map(runs, workers, [&](std::size_t k) {
    SimulatedOracle oracle(tm, dipole, relative_noise, seed + k);
    const auto res = optimize_polarization(oracle, start, opt);
    return purity(field_at_center(res.drives, tm));
  });
}

}  // namespace rydcirc
