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

// Resonant Rabi scans of the ladder and the probe-efficiency calibration.
//
// The nominal rf pulse length dt is longer than the effective one: the
// finite rise and fall of the rf amplitude act as a flat offset, so the
// atoms see max(0, dt + offset) of ideal square pulse.

#pragma once

#include <limits>
#include <map>
#include <random>
#include <vector>

#include "rydcirc/dynamics/drive.hpp"
#include "rydcirc/dynamics/protocols.hpp"
#include "rydcirc/experiments/detection.hpp"
#include "rydcirc/experiments/fit.hpp"

namespace rydcirc {

struct RabiScanOptions {
  double duration_offset = PulseEnvelope{}.duration_correction;  ///< s, generating value
  int atoms = 0;  ///< atoms per point; 0 gives noiseless populations
  std::uint64_t seed = 1;
  bool fit = true;
  double guess_rabi = 0.0;    ///< rad/s; 0 uses the generating value
  double guess_offset = 0.0;  ///< s
};

struct RabiScanResult {
  Trajectory data;       ///< nominal durations, measured populations
  Trajectory errors;     ///< binomial 1 sigma per level and point
  FitResult fit;         ///< omega_over_2pi_MHz, offset_ns
  double rabi = 0.0;     ///< fitted, rad/s
  double offset = 0.0;   ///< fitted, s
};

inline std::vector<double> effective_durations(const std::vector<double>& nominal, double offset) {
  std::vector<double> out;
  out.reserve(nominal.size());
  for (double t : nominal) {
    require(t >= 0, "pulse durations must be non-negative");
    out.push_back(std::max(0.0, t + offset));
  }
  return out;
}

/// Populations rearranged as one residual-ready vector (levels fastest).
inline Eigen::VectorXd flatten_populations(const Trajectory& tr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(tr.populations.size() * kNamedLevels.size()));
  Eigen::Index q = 0;
  for (const auto& p : tr.populations)
    for (double x : p.named) v(q++) = x;
  return v;
}

/// Fits (Omega_rf, duration offset) so the simulated scan reproduces `data`.
inline FitResult fit_rabi_scan(const TransferModel& model, const Trajectory& data, double guess_rabi,
                               double guess_offset, const Trajectory* errors = nullptr,
                               bool coarse_seed = true) {
  require(!data.times.empty(), "empty Rabi scan");
  require(guess_rabi > 0, "Rabi frequency guess must be positive");
  const Eigen::VectorXd y = flatten_populations(data);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(y.size());
  if (errors) {
    const Eigen::VectorXd e = flatten_populations(*errors);
    // Floor at one atom in 1000 so zero-count points keep finite weight.
    for (Eigen::Index k = 0; k < e.size(); ++k) w(k) = 1.0 / std::max(e(k), 1e-3);
  }
  // Coarse seed: +-15% in Omega, -200..+100 ns in offset; one diagonalization per Omega.
  double best = std::numeric_limits<double>::infinity();
  double seed_rabi = guess_rabi;
  double seed_offset = guess_offset;
  if (coarse_seed) {
    std::vector<double> offsets;
    for (int q = 0; q <= 60; ++q) offsets.push_back(guess_offset - 200e-9 + 5e-9 * q);
    for (int f = -15; f <= 15; ++f) {
      const double rabi = guess_rabi * (1.0 + 0.01 * f);
      std::vector<double> all;
      for (double o : offsets) {
        const auto eff = effective_durations(data.times, o);
        all.insert(all.end(), eff.begin(), eff.end());
      }
      const auto sim = model.rabi_scan(rabi, 0.0, all);
      for (std::size_t q = 0; q < offsets.size(); ++q) {
        double rss = 0;
        for (std::size_t t = 0; t < data.times.size(); ++t)
          for (std::size_t k = 0; k < kNamedLevels.size(); ++k) {
            const auto idx = static_cast<Eigen::Index>(t * kNamedLevels.size() + k);
            const double r = (sim.populations[q * data.times.size() + t].named[k] - y(idx)) * w(idx);
            rss += r * r;
          }
        if (rss < best) {
          best = rss;
          seed_rabi = rabi;
          seed_offset = offsets[q];
        }
      }
    }
  }
  auto residual = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    const double rabi = kTwoPi * 1e6 * p(0);
    if (!(rabi > 0)) return Eigen::VectorXd::Constant(y.size(), 1e3);
    const auto sim = model.rabi_scan(rabi, 0.0, effective_durations(data.times, 1e-9 * p(1)));
    return (flatten_populations(sim) - y).cwiseProduct(w);
  };
  return least_squares(residual, Eigen::Vector2d(seed_rabi / (kTwoPi * 1e6), seed_offset * 1e9),
                       {"omega_over_2pi_MHz", "offset_ns"});
}

/// Simulated resonant scan at Omega_rf over nominal durations, with optional binomial sampling and fit.
inline RabiScanResult rabi_scan_experiment(const TransferModel& model, double rabi,
                                           const std::vector<double>& durations,
                                           const RabiScanOptions& opt = {}) {
  require(rabi > 0, "Rabi frequency must be positive");
  RabiScanResult out;
  const auto truth = model.rabi_scan(rabi, 0.0, effective_durations(durations, opt.duration_offset));
  out.data.times = durations;
  out.data.populations = truth.populations;
  out.errors.times = durations;
  out.errors.populations.assign(durations.size(), LevelPopulations{});
  if (opt.atoms > 0) {
    std::mt19937_64 rng(opt.seed);
    for (std::size_t q = 0; q < durations.size(); ++q) {
      const auto& p = truth.populations[q];
      std::vector<double> probs(p.named.begin(), p.named.end());
      const auto counts = binomial_sample(probs, opt.atoms, rng);
      for (std::size_t k = 0; k < kNamedLevels.size(); ++k) {
        const double f = counts[k] / opt.atoms;
        out.data.populations[q].named[k] = f;
        out.errors.populations[q].named[k] = std::sqrt(f * (1 - f) / opt.atoms);
      }
    }
  }
  if (opt.fit) {
    const double g = opt.guess_rabi > 0 ? opt.guess_rabi : rabi;
    out.fit = fit_rabi_scan(model, out.data, g, opt.guess_offset, opt.atoms > 0 ? &out.errors : nullptr);
    out.rabi = kTwoPi * 1e6 * out.fit.params(0);
    out.offset = 1e-9 * out.fit.params(1);
  }
  return out;
}

// --- probe-efficiency calibration ----------------------------------------

/// Output distribution of the adiabatic passage for each prepared level.
using PassageMap = std::map<NamedLevel, LevelPopulations>;

/// Ideal map: i, j, k, l -> c, d, e, f.
inline PassageMap ideal_passage_map() {
  PassageMap m;
  const std::array<std::pair<NamedLevel, NamedLevel>, 4> pairs{{{NamedLevel::kI, NamedLevel::kC},
                                                                {NamedLevel::kJ, NamedLevel::kD},
                                                                {NamedLevel::kK, NamedLevel::kE},
                                                                {NamedLevel::kL, NamedLevel::kF}}};
  for (const auto& [q, p] : pairs) {
    LevelPopulations pop;
    pop.named[static_cast<std::size_t>(p)] = 1.0;
    m[q] = pop;
  }
  return m;
}

struct ProbeCalibrationOptions {
  double eta0 = 0.23;
  std::map<NamedLevel, double> eta_true;  ///< true eta_p; missing entries are eta0 * probe_fidelity
  double probe_fidelity = 1.0;
  double spurious_fraction = 0.0;  ///< population left on the neighbouring preparation level
  PassageMap passage = ideal_passage_map();
};

struct ProbeCalibrationResult {
  std::map<NamedLevel, double> eta;        ///< estimates for c, d, e
  double eta_fg = 0.0;                     ///< joint f/g estimate
  std::map<NamedLevel, double> eta_true;   ///< c, d, e, f, g
  std::map<NamedLevel, LevelPopulations> prepared;  ///< distribution after passage per q
};

/// Calibration chain: prepare q (with spill to a neighbour), pass to p, probe and compare to N(51,i).
/// Assuming all atoms reached p gives eta_p = eta0 * N(49,p) / N(51,i), which can only underestimate.
inline ProbeCalibrationResult probe_calibration_sequence(const ProbeCalibrationOptions& opt) {
  require(opt.eta0 > 0 && opt.eta0 <= 1, "eta0 must lie in (0, 1]");
  require(opt.probe_fidelity > 0 && opt.probe_fidelity <= 1, "probe fidelity must lie in (0, 1]");
  require(opt.spurious_fraction >= 0 && opt.spurious_fraction < 1, "spurious fraction must lie in [0, 1)");
  using L = NamedLevel;
  auto eta_true = [&](L p) {
    const auto it = opt.eta_true.find(p);
    return it == opt.eta_true.end() ? opt.eta0 * opt.probe_fidelity : it->second;
  };
  const std::array<std::array<L, 3>, 4> chain{{{L::kI, L::kJ, L::kC},
                                               {L::kJ, L::kK, L::kD},
                                               {L::kK, L::kL, L::kE},
                                               {L::kL, L::kK, L::kF}}};
  ProbeCalibrationResult out;
  for (L p : {L::kC, L::kD, L::kE, L::kF, L::kG}) out.eta_true[p] = eta_true(p);
  for (const auto& [q, spill, p] : chain) {
    const auto a = opt.passage.find(q);
    const auto b = opt.passage.find(spill);
    require(a != opt.passage.end() && b != opt.passage.end(), "passage map lacks a prepared level");
    LevelPopulations after;
    for (std::size_t k = 0; k < kNamedLevels.size(); ++k)
      after.named[k] = (1 - opt.spurious_fraction) * a->second.named[k] + opt.spurious_fraction * b->second.named[k];
    out.prepared[q] = after;
    // Detected ratio N(49,p)/N(51,i) = eta_p P_p / eta0.
    auto ratio = [&](L x) { return eta_true(x) * after[x] / opt.eta0; };
    if (p == L::kF) out.eta_fg = opt.eta0 * (ratio(L::kF) + ratio(L::kG));
    else out.eta[p] = opt.eta0 * ratio(p);
  }
  return out;
}

}  // namespace rydcirc
