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

// Detection model: state-selective field ionization and the microwave probe
// correction that turns detected counts into level populations.
//
// A level p of manifold 51 is read out by a microwave pi pulse to |49,p>
// followed by ionization. With eta_p the overall transfer and detection
// efficiency of that chain and eta0 the detection efficiency of the
// reference |51,i> signal,
//   P_p = (eta0 / eta_p) * N(49,p) / N(51,i).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "rydcirc/constants.hpp"
#include "rydcirc/dynamics/trajectory.hpp"
#include "rydcirc/error.hpp"
#include "rydcirc/manifold/named_levels.hpp"

namespace rydcirc {

struct ProbeCalibration {
  double eta0 = 0.23;
  std::map<NamedLevel, double> eta_p;  ///< levels without an entry use eta0

  double eta(NamedLevel p) const {
    const auto it = eta_p.find(p);
    return it == eta_p.end() ? eta0 : it->second;
  }
  void validate() const {
    require(eta0 > 0 && eta0 <= 1, "eta0 must lie in (0, 1]");
    for (const auto& [p, v] : eta_p)
      require(v > 0 && v <= 1, "eta_p must lie in (0, 1]");
  }
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;  ///< 1 sigma
};

/// Probe-corrected population of level p with its binomial error bar.
///
/// The detected fraction r = N49p / N51i is treated as a binomial proportion
/// over N51i trials, sigma_r = sqrt(r (1 - r) / N51i); for r > 1 the Poisson
/// form sqrt(N49p) / N51i is used instead.
inline Estimate probe_corrected_population(double n49p, double n51i, const ProbeCalibration& cal,
                                           NamedLevel p) {
  cal.validate();
  require(n49p >= 0 && std::isfinite(n49p), "counts must be non-negative");
  require(n51i > 0 && std::isfinite(n51i), "reference count N(51,i) must be positive");
  const double scale = cal.eta0 / cal.eta(p);
  const double r = n49p / n51i;
  const double sr = r <= 1.0 ? std::sqrt(r * (1.0 - r) / n51i) : std::sqrt(n49p) / n51i;
  return {scale * r, scale * sr};
}

/// Binomial number of successes for each probability, `atoms` trials each.
inline std::vector<double> binomial_sample(const std::vector<double>& probabilities, int atoms,
                                           std::mt19937_64& rng) {
  require(atoms > 0, "atom number must be positive");
  std::vector<double> out;
  out.reserve(probabilities.size());
  for (double p : probabilities) {
    require(p >= -1e-12 && p <= 1.0 + 1e-12, "probabilities must lie in [0, 1]");
    std::binomial_distribution<int> b(atoms, std::clamp(p, 0.0, 1.0));
    out.push_back(static_cast<double>(b(rng)));
  }
  return out;
}

// --- field-ionization spectra -------------------------------------------

/// Per-level ionization peaks in arbitrary field units.
struct IonizationModel {
  std::array<double, kNamedLevels.size()> threshold{};   ///< peak centre
  std::array<double, kNamedLevels.size()> efficiency{};  ///< detection efficiency
  double width = 0.02;                                   ///< Gaussian sigma of every peak
  std::optional<double> other_threshold;                 ///< peak for unnamed levels, if any
  double other_efficiency = 1.0;

  /// Placeholder layout: thresholds rise with m (low-m states ionize first),
  /// unit efficiency except the circular level at eta0.
  static IonizationModel defaults(double eta0 = 0.23) {
    IonizationModel m;
    using L = NamedLevel;
    const std::array<std::pair<L, double>, kNamedLevels.size()> layout{{{L::kIPrime, 1.00},
                                                                        {L::kI, 1.10},
                                                                        {L::kJ, 1.20},
                                                                        {L::kK, 1.30},
                                                                        {L::kL, 1.40},
                                                                        {L::kG, 1.60},
                                                                        {L::kF, 1.70},
                                                                        {L::kE, 1.80},
                                                                        {L::kD, 1.90},
                                                                        {L::kC, 2.00}}};
    for (const auto& [p, t] : layout) {
      m.threshold[static_cast<std::size_t>(p)] = t;
      m.efficiency[static_cast<std::size_t>(p)] = 1.0;
    }
    m.efficiency[static_cast<std::size_t>(L::kC)] = eta0;
    return m;
  }

  void validate() const {
    require(width > 0, "ionization peak width must be positive");
    for (std::size_t k = 0; k < threshold.size(); ++k) {
      require(std::isfinite(threshold[k]), "ionization thresholds must be finite");
      require(efficiency[k] >= 0 && efficiency[k] <= 1, "detection efficiencies must lie in [0, 1]");
    }
  }
};

/// Detected signal density on `fields`: sum over levels of eff_p P_p N(threshold_p, width).
/// Each peak has area eff_p P_p, independent of the width.
inline std::vector<double> ionization_spectrum(const LevelPopulations& pop, const IonizationModel& m,
                                               const std::vector<double>& fields) {
  m.validate();
  require(pop.total() <= 1.0 + 1e-9, "populations must sum to at most 1");
  const double norm = 1.0 / (m.width * std::sqrt(kTwoPi));
  std::vector<double> out(fields.size(), 0.0);
  auto add = [&](double centre, double weight) {
    if (weight == 0.0) return;
    for (std::size_t q = 0; q < fields.size(); ++q) {
      const double x = (fields[q] - centre) / m.width;
      out[q] += weight * norm * std::exp(-0.5 * x * x);
    }
  };
  for (std::size_t k = 0; k < kNamedLevels.size(); ++k) add(m.threshold[k], m.efficiency[k] * pop.named[k]);
  if (m.other_threshold) add(*m.other_threshold, m.other_efficiency * pop.other);
  return out;
}

/// Trapezoidal area of a sampled curve between fields lo and hi.
inline double spectrum_area(const std::vector<double>& fields, const std::vector<double>& signal,
                            double lo = -std::numeric_limits<double>::infinity(),
                            double hi = std::numeric_limits<double>::infinity()) {
  require(fields.size() == signal.size(), "field and signal sizes differ");
  double a = 0.0;
  for (std::size_t q = 1; q < fields.size(); ++q) {
    if (fields[q - 1] < lo || fields[q] > hi) continue;
    a += 0.5 * (signal[q] + signal[q - 1]) * (fields[q] - fields[q - 1]);
  }
  return a;
}

/// Transfer efficiency 1 - A_i(after) / A_i(reference) from the residual i peak,
/// integrated over +-3 widths around its threshold.
inline double transfer_from_residual(const std::vector<double>& fields,
                                     const std::vector<double>& reference,
                                     const std::vector<double>& after, const IonizationModel& m) {
  const double t = m.threshold[static_cast<std::size_t>(NamedLevel::kI)];
  const double a0 = spectrum_area(fields, reference, t - 3 * m.width, t + 3 * m.width);
  const double a1 = spectrum_area(fields, after, t - 3 * m.width, t + 3 * m.width);
  require(a0 > 0, "reference spectrum has no signal at the i threshold");
  return 1.0 - a1 / a0;
}

}  // namespace rydcirc
