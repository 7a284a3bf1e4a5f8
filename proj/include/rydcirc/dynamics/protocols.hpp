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

// Transfer protocols: resonant Rabi pulses and rf adiabatic passage.
//
// Hydrogen runs start on the bottom of the n1 = 0 ladder |n,0,0> (mJ = -J);
// Rb runs start on |n,i> = |n,1,2>. A detuning delta is realized by setting
// the static field, delta = w_n(F) - w_rf, as in the experiment.

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rydcirc/dynamics/control.hpp"
#include "rydcirc/dynamics/propagate.hpp"
#include "rydcirc/dynamics/rb_dynamics.hpp"
#include "rydcirc/dynamics/trajectory.hpp"
#include "rydcirc/manifold/hydrogen.hpp"
#include "rydcirc/manifold/rb_stark.hpp"

namespace rydcirc {

/// delta = w_n(F) - w_rf, rad/s.
inline double detuning(int n, double field, double omega_rf) {
  return stark_frequency(n, field) - omega_rf;
}

/// Static field (V/m) at which the ladder of manifold n has detuning delta.
inline double field_for_detuning(int n, double delta, double omega_rf) {
  const double f = (omega_rf + delta) / stark_frequency(n, 1.0);
  require(f >= 0, "requested detuning needs a negative field");
  return f;
}

enum class ModelKind { kHydrogen, kRb };

inline std::string to_string(ModelKind k) { return k == ModelKind::kHydrogen ? "hydrogen" : "rb"; }

inline ModelKind model_kind_from(const std::string& s) {
  if (s == "hydrogen") return ModelKind::kHydrogen;
  if (s == "rb" || s == "rubidium") return ModelKind::kRb;
  throw InvalidArgument("unknown model '" + s + "' (expected hydrogen or rb)");
}

struct TransferModelConfig {
  ModelKind kind = ModelKind::kRb;
  int n = 51;
  double omega_rf = kTwoPi * 230e6;  ///< rad/s
  DefectTable defects = DefectTable::rubidium85();
  int window = 3;
  double cutoff_hz = 0.6e9;
  HydrogenOptions hydrogen{};
  PropagateOptions propagation{};
};

struct PassageResult {
  LevelPopulations final;
  Trajectory trajectory;
  double delta_start = 0.0;  ///< rad/s
  double delta_end = 0.0;    ///< rad/s
};

/// Shared model state for repeated protocol runs (Stark eigenbases are cached).
class TransferModel {
 public:
  explicit TransferModel(TransferModelConfig cfg) : cfg_(std::move(cfg)) {
    require(cfg_.n >= 7, "transfer protocols need n >= 7");
    require(cfg_.omega_rf > 0, "omega_rf must be positive");
  }

  const TransferModelConfig& config() const { return cfg_; }

  std::shared_ptr<const RbStarkModel> stark_model() const {
    const std::lock_guard<std::mutex> lock(mutex_);
    if (!stark_) stark_ = std::make_shared<const RbStarkModel>(cfg_.n, cfg_.defects, cfg_.window);
    return stark_;
  }

  std::shared_ptr<const RbTransferBasis> rb_basis(double reference_field) const {
    auto model = stark_model();
    {
      const std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = bases_.find(reference_field); it != bases_.end()) return it->second;
    }
    RbDynamicsOptions opt;
    opt.reference_field = reference_field;
    opt.omega_rf = cfg_.omega_rf;
    opt.cutoff_hz = cfg_.cutoff_hz;
    auto b = std::make_shared<const RbTransferBasis>(model, opt);
    const std::lock_guard<std::mutex> lock(mutex_);
    return bases_.emplace(reference_field, b).first->second;
  }

  /// Named-level index map and initial state of the model at a given field.
  struct Setup {
    std::unique_ptr<Generator> generator;
    LevelMap levels{};
    CVector initial;
  };

  /// Constant-field, constant-amplitude sigma+ drive.
  Setup constant_drive(double rabi, double field) const {
    Setup s;
    if (cfg_.kind == ModelKind::kHydrogen) {
      DriveConfig d;
      d.omega_rf = cfg_.omega_rf;
      d.e_plus = ladder_field_for_rabi(cfg_.n, rabi);
      auto h = std::make_unique<HydrogenHamiltonian>(cfg_.n, field, d, cfg_.hydrogen);
      fill_hydrogen(*h, s);
      s.generator = std::move(h);
    } else {
      auto basis = rb_basis(field);
      s.generator = std::make_unique<RbGenerator>(
          RbGenerator::constant(basis, field, basis->field_for_rabi(rabi)));
      fill_rb(*basis, s);
    }
    return s;
  }

  /// Final populations after an ideal square pulse of the given duration.
  LevelPopulations rabi_transfer(double rabi, double delta, double duration) const {
    require(duration >= 0, "pulse duration must be non-negative");
    auto s = constant_drive(rabi, field_for_detuning(cfg_.n, delta, cfg_.omega_rf));
    if (duration == 0.0) return populations_of(s.initial, s.levels);
    const auto ev = propagate(*s.generator, s.initial, {0.0, duration}, cfg_.propagation);
    return populations_of(ev.states.back(), s.levels);
  }

  /// Populations for every pulse duration in `durations` (any order, duplicates allowed).
  Trajectory rabi_scan(double rabi, double delta, const std::vector<double>& durations) const {
    auto s = constant_drive(rabi, field_for_detuning(cfg_.n, delta, cfg_.omega_rf));
    std::vector<double> grid{0.0};
    for (double t : durations) {
      require(t >= 0, "pulse duration must be non-negative");
      grid.push_back(t);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const auto ev = propagate(*s.generator, s.initial, grid, cfg_.propagation);
    Trajectory tr;
    for (double t : durations) {
      const auto k = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
      tr.times.push_back(t);
      tr.populations.push_back(populations_of(ev.states[k], s.levels));
    }
    return tr;
  }

  /// rf adiabatic passage: rf up at F_start, field ramp, rf down at F_end.
  PassageResult adiabatic_passage(double rabi, FieldRamp ramp, RampShape shape = RampShape::kLinear,
                                  std::size_t samples = 0) const {
    ramp.validate();
    PassageResult out;
    out.delta_start = detuning(cfg_.n, ramp.f_start, cfg_.omega_rf);
    out.delta_end = detuning(cfg_.n, ramp.f_end, cfg_.omega_rf);
    if (!(out.delta_start * out.delta_end < 0.0))
      throw InvalidArgument("field ramp does not cross the resonance (delta does not change sign)");
    const PulseEnvelope env = PulseEnvelope::ramped(ramp.pre_hold, ramp.duration, ramp.post_hold, shape);
    Setup s;
    if (cfg_.kind == ModelKind::kHydrogen) {
      DriveConfig d;
      d.omega_rf = cfg_.omega_rf;
      d.e_plus = ladder_field_for_rabi(cfg_.n, rabi);
      d.envelope = env;
      auto h = std::make_unique<HydrogenHamiltonian>(cfg_.n, ramp, d, cfg_.hydrogen);
      fill_hydrogen(*h, s);
      s.generator = std::move(h);
    } else {
      auto basis = rb_basis(0.5 * (ramp.f_start + ramp.f_end));
      s.generator = std::make_unique<RbGenerator>(basis, ramp, basis->field_for_rabi(rabi), env);
      fill_rb(*basis, s);
    }
    std::vector<double> grid = samples >= 2 ? uniform_grid(0.0, ramp.total(), samples)
                                            : std::vector<double>{0.0, ramp.total()};
    out.trajectory = propagate_trajectory(*s.generator, s.initial, grid, s.levels, cfg_.propagation);
    out.final = out.trajectory.populations.back();
    return out;
  }

 private:
  void fill_hydrogen(const HydrogenHamiltonian& h, Setup& s) const {
    for (std::size_t q = 0; q < kNamedLevels.size(); ++q)
      s.levels[q] = h.index_of(resolve(kNamedLevels[q], cfg_.n));
    s.initial = basis_state(h.dim(), h.index_of(ParabolicState::make(cfg_.n, 0, 0)));
  }
  void fill_rb(const RbTransferBasis& b, Setup& s) const {
    for (std::size_t q = 0; q < kNamedLevels.size(); ++q)
      s.levels[q] = b.index_of(resolve(kNamedLevels[q], cfg_.n));
    s.initial = basis_state(b.dim(), *b.index_of(resolve(NamedLevel::kI, cfg_.n)));
  }

  TransferModelConfig cfg_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const RbStarkModel> stark_;
  mutable std::map<double, std::shared_ptr<const RbTransferBasis>> bases_;
};

/// One-shot Rabi transfer; builds a fresh model.
inline LevelPopulations rabi_transfer(int n, double rabi, double delta, double duration,
                                      ModelKind model) {
  TransferModelConfig cfg;
  cfg.kind = model;
  cfg.n = n;
  return TransferModel(cfg).rabi_transfer(rabi, delta, duration);
}

/// One-shot adiabatic passage with rf rise/fall times overriding the ramp holds.
inline LevelPopulations adiabatic_passage(int n, double rabi, FieldRamp ramp, double rise,
                                          double fall, ModelKind model = ModelKind::kRb) {
  TransferModelConfig cfg;
  cfg.kind = model;
  cfg.n = n;
  ramp.pre_hold = rise;
  ramp.post_hold = fall;
  return TransferModel(cfg).adiabatic_passage(rabi, ramp).final;
}

}  // namespace rydcirc
