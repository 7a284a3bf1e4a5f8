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

// Polarization diagnostics on the isolated i -> i' transition.
//
// sigma-minus: resonant Rabi oscillation driven by E-, fitted to
//   P_i'(t) = A sin^2(Omega t / 2).
// Autler-Townes: E+ dresses i <-> i' (field reversed); a weak probe from a
// third level sees the two dressed components, fitted with two Gaussians.

#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rydcirc/constants.hpp"
#include "rydcirc/dynamics/generator.hpp"
#include "rydcirc/dynamics/propagate.hpp"
#include "rydcirc/experiments/detection.hpp"
#include "rydcirc/experiments/fit.hpp"
#include "rydcirc/rf/electrodes.hpp"

namespace rydcirc {

// --- sigma- Rabi oscillation -------------------------------------------

struct SigmaMinusOptions {
  double dipole = 0.0;  ///< d_ii' (C m), required
  int atoms = 0;        ///< atoms per point; 0 gives noiseless populations
  std::uint64_t seed = 1;
};

struct SigmaMinusResult {
  std::vector<double> times;       ///< s
  std::vector<double> population;  ///< P_i'
  std::vector<double> error;       ///< binomial 1 sigma (0 when noiseless)
  double omega_true = 0.0;         ///< rad/s, from the field
  FitResult fit;                   ///< omega_over_2pi_MHz, amplitude
  double omega_minus = 0.0;        ///< fitted, rad/s
  double half_period = 0.0;        ///< pi / fitted omega, s
  bool flat = false;
};

/// Fits A sin^2(Omega t / 2); a coarse frequency scan seeds Levenberg-Marquardt.
inline FitResult fit_rabi_sinusoid(const std::vector<double>& t, const std::vector<double>& y) {
  require(t.size() == y.size() && t.size() >= 3, "need at least three samples");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  FitResult flat;
  flat.names = {"omega_over_2pi_MHz", "amplitude"};
  flat.params = Eigen::Vector2d::Zero();
  flat.sigmas = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  if (*hi - *lo < 1e-9) {
    flat.ok = false;
    flat.message = "flat data: no oscillation to fit";
    return flat;
  }
  const double span = t.back() - t.front();
  double dt_min = span;
  for (std::size_t k = 1; k < t.size(); ++k) dt_min = std::min(dt_min, t[k] - t[k - 1]);
  require(span > 0 && dt_min > 0, "time grid must be strictly increasing");
  // Frequencies in MHz from a tenth of a cycle over the span up to Nyquist.
  const double f_lo = 0.1 / span * 1e-6;
  const double f_hi = 0.5 / dt_min * 1e-6;
  double best_f = f_lo;
  double best_rss = std::numeric_limits<double>::infinity();
  const int nscan = 2000;
  for (int q = 0; q < nscan; ++q) {
    const double f = f_lo * std::pow(f_hi / f_lo, q / (nscan - 1.0));
    double ss = 0, sy = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double s = std::pow(std::sin(kPi * f * 1e6 * t[k]), 2);
      ss += s * s;
      sy += s * y[k];
    }
    if (ss == 0) continue;
    const double a = sy / ss;
    double rss = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double r = y[k] - a * std::pow(std::sin(kPi * f * 1e6 * t[k]), 2);
      rss += r * r;
    }
    if (rss < best_rss) {
      best_rss = rss;
      best_f = f;
    }
  }
  double ss = 0, sy = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double s = std::pow(std::sin(kPi * best_f * 1e6 * t[k]), 2);
    ss += s * s;
    sy += s * y[k];
  }
  auto residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(t.size()));
    for (std::size_t k = 0; k < t.size(); ++k)
      r(static_cast<Eigen::Index>(k)) = y[k] - p(1) * std::pow(std::sin(kPi * p(0) * 1e6 * t[k]), 2);
    return r;
  };
  return least_squares(residual, Eigen::Vector2d(best_f, sy / ss), {"omega_over_2pi_MHz", "amplitude"});
}

/// i -> i' Rabi oscillation driven by E- (V/m) on the time grid `t` (s).
inline SigmaMinusResult sigma_minus_rabi_experiment(cplx e_minus, const std::vector<double>& t,
                                                    const SigmaMinusOptions& opt) {
  require(opt.dipole > 0, "sigma-minus experiment needs d_ii' > 0");
  require(!t.empty() && t.front() >= 0, "time grid must start at t >= 0");
  SigmaMinusResult out;
  out.times = t;
  out.omega_true = rabi_from_field(e_minus, opt.dipole);
  std::vector<double> grid{0.0};
  for (double x : t)
    if (x > grid.back()) grid.push_back(x);
    else require(x == grid.back(), "time grid must be increasing");
  const TwoLevelGenerator gen(out.omega_true, 0.0);
  const auto ev = propagate(gen, basis_state(2, 0), grid);
  for (double x : t) {
    const auto k = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), x) - grid.begin());
    out.population.push_back(std::norm(ev.states[k](1)));
  }
  out.error.assign(t.size(), 0.0);
  if (opt.atoms > 0) {
    std::mt19937_64 rng(opt.seed);
    const auto counts = binomial_sample(out.population, opt.atoms, rng);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double p = counts[k] / opt.atoms;
      out.population[k] = p;
      out.error[k] = std::sqrt(p * (1 - p) / opt.atoms);
    }
  }
  out.fit = fit_rabi_sinusoid(t, out.population);
  out.flat = !out.fit.ok && out.fit.message.rfind("flat", 0) == 0;
  if (!out.flat) {
    out.omega_minus = kTwoPi * 1e6 * out.fit.params(0);
    out.half_period = kPi / out.omega_minus;
  }
  return out;
}

// --- Autler-Townes doublet ---------------------------------------------

struct AutlerTownesOptions {
  double dipole = 0.0;                ///< d_ii' (C m), required
  double linewidth_fwhm_hz = 4e6;     ///< Gaussian probe-line FWHM
  double dressing_detuning_hz = 0.0;  ///< rf detuning from the i -> i' resonance
};

struct DressedLine {
  double position_hz = 0.0;  ///< relative to the bare carrier
  double weight = 0.0;       ///< |<i|dressed>|^2
};

struct AutlerTownesResult {
  std::vector<double> detunings;  ///< probe detuning, Hz
  std::vector<double> signal;     ///< arbitrary units, total area 1
  std::array<DressedLine, 2> lines{};
  double omega_true = 0.0;  ///< rad/s
  FitResult fit;            ///< a1, x1_MHz, a2, x2_MHz, sigma_MHz
  double splitting_hz = 0.0;
  double omega_plus = 0.0;  ///< rad/s, from the fitted splitting
  bool resolved = true;
};

/// Dressed components of i under H = [[-D/2, W/2], [W/2, D/2]] (rotating frame, Hz).
inline std::array<DressedLine, 2> dressed_lines(double omega, double detuning_hz) {
  Eigen::Matrix2d h;
  const double w = omega / kTwoPi;
  h << -0.5 * detuning_hz, 0.5 * w, 0.5 * w, 0.5 * detuning_hz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
  std::array<DressedLine, 2> out{};
  for (int k = 0; k < 2; ++k) {
    out[static_cast<std::size_t>(k)].position_hz = es.eigenvalues()(k) + 0.5 * detuning_hz;
    out[static_cast<std::size_t>(k)].weight = es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  }
  return out;
}

inline double gaussian_line(double x, double centre, double sigma) {
  const double u = (x - centre) / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(kTwoPi));
}

/// Two-Gaussian fit with a shared width; axes in MHz.
inline FitResult fit_doublet(const std::vector<double>& x_mhz, const std::vector<double>& y,
                             double sigma_guess_mhz) {
  require(x_mhz.size() == y.size() && x_mhz.size() >= 6, "need at least six samples");
  // Seeds: the two highest local maxima (or the global one twice).
  std::vector<std::size_t> peaks;
  for (std::size_t k = 1; k + 1 < y.size(); ++k)
    if (y[k] > y[k - 1] && y[k] >= y[k + 1]) peaks.push_back(k);
  std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return y[a] > y[b]; });
  const auto top = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const std::size_t p1 = peaks.empty() ? top : peaks[0];
  const std::size_t p2 = peaks.size() > 1 ? peaks[1] : p1;
  const double h = sigma_guess_mhz * std::sqrt(kTwoPi);
  double x1 = x_mhz[std::min(p1, p2)];
  double x2 = x_mhz[std::max(p1, p2)];
  if (p1 == p2) {
    x1 -= 0.5 * sigma_guess_mhz;
    x2 += 0.5 * sigma_guess_mhz;
  }
  Eigen::VectorXd p0(5);
  p0 << y[std::min(p1, p2)] * h, x1, y[std::max(p1, p2)] * h, x2, sigma_guess_mhz;
  if (p1 == p2) p0(0) = p0(2) = 0.5 * y[p1] * h;
  auto residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(y.size()));
    const double s = std::abs(p(4));
    for (std::size_t k = 0; k < y.size(); ++k)
      r(static_cast<Eigen::Index>(k)) =
          y[k] - p(0) * gaussian_line(x_mhz[k], p(1), s) - p(2) * gaussian_line(x_mhz[k], p(3), s);
    return r;
  };
  auto fit = least_squares(residual, p0, {"a1", "x1_MHz", "a2", "x2_MHz", "sigma_MHz"});
  fit.params(4) = std::abs(fit.params(4));
  return fit;
}

/// Probe spectrum of i dressed by E+ (V/m), on probe detunings `grid_hz`.
inline AutlerTownesResult autler_townes_experiment(cplx e_plus, const std::vector<double>& grid_hz,
                                                   const AutlerTownesOptions& opt) {
  require(opt.dipole > 0, "Autler-Townes experiment needs d_ii' > 0");
  require(opt.linewidth_fwhm_hz > 0, "probe linewidth must be positive");
  AutlerTownesResult out;
  out.detunings = grid_hz;
  out.omega_true = rabi_from_field(e_plus, opt.dipole);
  out.lines = dressed_lines(out.omega_true, opt.dressing_detuning_hz);
  const double sigma = opt.linewidth_fwhm_hz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  for (double x : grid_hz) {
    double s = 0.0;
    for (const auto& l : out.lines) s += l.weight * gaussian_line(x * 1e-6, l.position_hz * 1e-6, sigma * 1e-6);
    out.signal.push_back(s);
  }
  std::vector<double> x_mhz;
  for (double x : grid_hz) x_mhz.push_back(x * 1e-6);
  out.fit = fit_doublet(x_mhz, out.signal, sigma * 1e-6);
  const double split = std::abs(out.fit.params(3) - out.fit.params(1)) * 1e6;
  const double weak = std::min(std::abs(out.fit.params(0)), std::abs(out.fit.params(2)));
  out.resolved = out.fit.ok && split >= opt.linewidth_fwhm_hz && weak > 1e-3;
  if (out.resolved) {
    out.splitting_hz = split;
    const double d = opt.dressing_detuning_hz;
    out.omega_plus = kTwoPi * std::sqrt(std::max(0.0, split * split - d * d));
  }
  return out;
}

}  // namespace rydcirc
