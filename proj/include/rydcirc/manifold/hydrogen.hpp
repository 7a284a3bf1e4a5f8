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

// Hydrogen n-manifold in the two-pseudospin representation.
//
// Inside the manifold the Stark Hamiltonian is w_n (J1z - J2z) and the dipole
// operator is r = (3/2) n a0 (J1 - J2), so r_+ = x + i y = (3/2) n a0 (J1+ - J2+).
// A sigma+ field Re[E+ e^{-i w t}(x + i y)] then couples with
//   V / hbar = (Omega/2) [e^{-i w t} (J1+ - J2+) + h.c.],  Omega = (3/2) n e a0 E+ / hbar,
// and on the n1 = 0 ladder (m2 = j) it is exactly Omega Jx.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rydcirc/constants.hpp"
#include "rydcirc/dynamics/drive.hpp"
#include "rydcirc/dynamics/generator.hpp"
#include "rydcirc/error.hpp"
#include "rydcirc/manifold/states.hpp"

namespace rydcirc {

/// w_n = (3/2) n F e a0 / hbar, rad/s.
inline double stark_frequency(int n, double field) {
  require(n >= 1, "stark_frequency needs n >= 1");
  require(field >= 0, "stark_frequency needs a non-negative field");
  const auto& c = constants();
  return 1.5 * n * field * c.e * c.a0 / c.hbar;
}

/// (3/2) n (n1 - n2) F e a0, J, relative to the manifold centre.
inline double first_order_energy(const ParabolicState& s, double field) {
  require(s.valid(), "first_order_energy needs a valid parabolic state");
  const auto& c = constants();
  return 1.5 * s.n * s.k() * field * c.e * c.a0;
}

/// <J, mJ+1| J+ |J, mJ> for the ladder spin of manifold n.
inline double ladder_coupling(int n, HalfInt mJ) {
  const HalfInt J = SpinLadderState::spin_of_manifold(n);
  require(n >= 2, "ladder_coupling needs n >= 2");
  require(mJ.twice >= -J.twice && mJ.twice < J.twice && (mJ.twice + J.twice) % 2 == 0,
          "ladder_coupling needs -J <= mJ < J");
  const double j = J.value();
  const double m = mJ.value();
  return std::sqrt(j * (j + 1.0) - m * (m + 1.0));
}

/// Rabi angular frequency of the ladder for a sigma+ amplitude E+ (V/m).
inline double ladder_rabi_frequency(int n, double e_plus) {
  const auto& c = constants();
  return 1.5 * n * c.e * c.a0 * e_plus / c.hbar;
}

/// sigma+ field amplitude (V/m) giving ladder Rabi angular frequency omega.
inline double ladder_field_for_rabi(int n, double omega) {
  return omega / ladder_rabi_frequency(n, 1.0);
}

enum class Frame { kLab, kRotating };

/// Treatment of the counter-rotating parts of the drive in the rotating frame.
enum class CounterRotating {
  kDrop,  ///< co-rotating approximation: sigma+ acts through J1+ only; sigma- rejected
  kKeep,  ///< retain J2+ exactly and keep sigma- explicitly time-dependent at 2 w_rf
};

struct HydrogenOptions {
  Frame frame = Frame::kRotating;
  CounterRotating counter_rotating = CounterRotating::kDrop;
};

/// Time-dependent generator over the full n^2 manifold (parabolic_basis order).
class HydrogenHamiltonian final : public Generator {
 public:
  HydrogenHamiltonian(int n, double field, DriveConfig drive, HydrogenOptions opt = {})
      : HydrogenHamiltonian(n, FieldRamp::constant(field), std::move(drive), opt, false) {}

  HydrogenHamiltonian(int n, FieldRamp ramp, DriveConfig drive, HydrogenOptions opt = {})
      : HydrogenHamiltonian(n, ramp, std::move(drive), opt, true) {}

  int n() const { return n_; }
  const std::vector<ParabolicState>& basis() const { return basis_; }

  Eigen::Index index_of(const ParabolicState& s) const {
    require(s.valid() && s.n == n_, "state does not belong to this manifold");
    const auto it = std::lower_bound(basis_.begin(), basis_.end(), s, order_less);
    return static_cast<Eigen::Index>(it - basis_.begin());
  }

  /// Indices of the n1 = 0 ladder, ordered by m = 0..n-1.
  std::vector<Eigen::Index> ladder_indices() const {
    std::vector<Eigen::Index> out;
    for (int m = 0; m < n_; ++m) out.push_back(index_of(ParabolicState::make(n_, 0, m)));
    return out;
  }

  double field_at(double t) const { return ramp_.at(t); }

  Eigen::Index dim() const override { return static_cast<Eigen::Index>(basis_.size()); }

  SparseH at(double t) const override {
    const double w_n = stark_frequency(n_, std::abs(field_at(t))) * (field_at(t) < 0 ? -1.0 : 1.0);
    const double w = drive_.omega_rf;
    const double s = drive_.envelope.amplitude(t);
    const cplx rp = 0.5 * s * omega_plus_;
    const cplx rm = 0.5 * s * omega_minus_;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(basis_.size() * 5);
    for (std::size_t a = 0; a < basis_.size(); ++a) {
      double diag = w_n * sz_[a];
      if (opt_.frame == Frame::kRotating) diag -= w * mz_[a];
      const auto ia = static_cast<Eigen::Index>(a);
      trip.emplace_back(ia, ia, diag);
    }
    const bool rot = opt_.frame == Frame::kRotating;
    const bool drop = rot && opt_.counter_rotating == CounterRotating::kDrop;
    // G = J1+ - J2+ (raises m by one); entries stored as (to, from, value).
    auto add_g = [&](cplx coef_g) {
      // coef_g * G + conj(coef_g) * G^dagger
      for (const auto& e : j1_plus_) {
        trip.emplace_back(e.row(), e.col(), coef_g * e.value());
        trip.emplace_back(e.col(), e.row(), std::conj(coef_g) * e.value());
      }
      if (drop) return;
      for (const auto& e : j2_plus_) {
        trip.emplace_back(e.row(), e.col(), -coef_g * e.value());
        trip.emplace_back(e.col(), e.row(), -std::conj(coef_g) * e.value());
      }
    };
    if (rot) {
      // sigma+ static; sigma- term  rm e^{-2iwt} G^dagger + h.c.
      if (std::abs(rp) > 0) add_g(rp);
      if (std::abs(rm) > 0) add_g(std::conj(rm * std::exp(cplx(0.0, -2.0 * w * t))));
    } else {
      const cplx ph = std::exp(cplx(0.0, -w * t));
      // lab frame: rp e^{-iwt} G + rm e^{-iwt} G^dagger + h.c.
      if (std::abs(rp) > 0) add_g(rp * ph);
      if (std::abs(rm) > 0) add_g(std::conj(rm * ph));
    }
    SparseH h(dim(), dim());
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
  }

  SparseH structure() const override {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (std::size_t a = 0; a < basis_.size(); ++a)
      trip.emplace_back(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a), 1.0);
    const bool driven = std::abs(omega_plus_) > 0 || std::abs(omega_minus_) > 0;
    if (driven) {
      for (const auto& e : j1_plus_) {
        trip.emplace_back(e.row(), e.col(), 1.0);
        trip.emplace_back(e.col(), e.row(), 1.0);
      }
      const bool drop =
          opt_.frame == Frame::kRotating && opt_.counter_rotating == CounterRotating::kDrop;
      if (!drop) {
        for (const auto& e : j2_plus_) {
          trip.emplace_back(e.row(), e.col(), 1.0);
          trip.emplace_back(e.col(), e.row(), 1.0);
        }
      }
    }
    SparseH h(dim(), dim());
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
  }

  bool time_independent() const override {
    return opt_.frame == Frame::kRotating && !has_ramp_ && std::abs(omega_minus_) == 0.0 &&
           drive_.envelope.is_continuous();
  }

  double rate_bound() const override {
    double r = std::max(std::abs(omega_plus_), std::abs(omega_minus_));
    const double w_lo = stark_frequency(n_, std::min(std::abs(ramp_.f_start), std::abs(ramp_.f_end)));
    const double w_hi = stark_frequency(n_, std::max(std::abs(ramp_.f_start), std::abs(ramp_.f_end)));
    if (opt_.frame == Frame::kRotating) {
      r = std::max({r, std::abs(w_lo - drive_.omega_rf), std::abs(w_hi - drive_.omega_rf)});
      if (std::abs(omega_minus_) > 0) r = std::max(r, 2.0 * drive_.omega_rf);
    } else {
      r = std::max({r, w_hi, drive_.omega_rf});
    }
    return r;
  }

  std::vector<double> breakpoints() const override {
    auto out = drive_.envelope.breakpoints();
    if (has_ramp_)
      for (double b : ramp_.breakpoints()) out.push_back(b);
    return out;
  }

  std::vector<std::string> labels() const override {
    std::vector<std::string> out;
    for (const auto& s : basis_) out.push_back(to_string(s));
    return out;
  }

 private:
  HydrogenHamiltonian(int n, FieldRamp ramp, DriveConfig drive, HydrogenOptions opt, bool has_ramp)
      : n_(n), ramp_(ramp), has_ramp_(has_ramp), drive_(std::move(drive)), opt_(opt) {
    require(n >= 2, "hydrogen manifold needs n >= 2");
    drive_.validate();
    if (has_ramp_) ramp_.validate();
    const bool driven = std::abs(drive_.e_plus) > 0 || std::abs(drive_.e_minus) > 0;
    if (opt_.frame == Frame::kRotating && driven)
      require(drive_.omega_rf > 0, "rotating frame needs omega_rf > 0");
    require(!(opt_.frame == Frame::kRotating &&
              opt_.counter_rotating == CounterRotating::kDrop && std::abs(drive_.e_minus) > 0),
            "co-rotating approximation cannot retain a sigma- component; use CounterRotating::kKeep");
    const double unit = ladder_rabi_frequency(n_, 1.0);
    omega_plus_ = unit * drive_.e_plus;
    omega_minus_ = unit * drive_.e_minus;
    basis_ = parabolic_basis(n_, MSector::kAll);
    std::sort(basis_.begin(), basis_.end(), order_less);
    const int tj = n_ - 1;
    for (const auto& s : basis_) {
      const auto p = to_pseudospins(s);
      sz_.push_back(p.m1.value() - p.m2.value());
      mz_.push_back(p.m1.value() + p.m2.value());
    }
    for (std::size_t a = 0; a < basis_.size(); ++a) {
      const auto p = to_pseudospins(basis_[a]);
      const double j = 0.5 * tj;
      if (p.m1.twice < tj) {
        const auto to = from_pseudospins(n_, {p.m1 + HalfInt::from_int(1), p.m2});
        const double m1 = p.m1.value();
        j1_plus_.emplace_back(index_of(to), static_cast<Eigen::Index>(a),
                              std::sqrt(j * (j + 1) - m1 * (m1 + 1)));
      }
      if (p.m2.twice < tj) {
        const auto to = from_pseudospins(n_, {p.m1, p.m2 + HalfInt::from_int(1)});
        const double m2 = p.m2.value();
        j2_plus_.emplace_back(index_of(to), static_cast<Eigen::Index>(a),
                              std::sqrt(j * (j + 1) - m2 * (m2 + 1)));
      }
    }
  }

  static bool order_less(const ParabolicState& a, const ParabolicState& b) {
    if (a.m != b.m) return a.m < b.m;
    return a.n1 < b.n1;
  }

  int n_;
  FieldRamp ramp_;
  bool has_ramp_;
  DriveConfig drive_;
  HydrogenOptions opt_;
  cplx omega_plus_;
  cplx omega_minus_;
  std::vector<ParabolicState> basis_;
  std::vector<double> sz_;
  std::vector<double> mz_;
  std::vector<Eigen::Triplet<double>> j1_plus_;
  std::vector<Eigen::Triplet<double>> j2_plus_;
};

/// delta Jz + Omega Jx on the n-state ladder (ladder_basis order), optional envelope.
class SpinLadderGenerator final : public Generator {
 public:
  SpinLadderGenerator(int n, double rabi, double detuning,
                      PulseEnvelope envelope = PulseEnvelope::continuous())
      : n_(n), rabi_(rabi), detuning_(detuning), envelope_(envelope) {
    require(n >= 2, "ladder needs n >= 2");
  }

  Eigen::Index dim() const override { return n_; }
  SparseH at(double t) const override {
    const double s = envelope_.amplitude(t);
    const double j = 0.5 * (n_ - 1);
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int k = 0; k < n_; ++k) {
      const double m = -j + k;
      trip.emplace_back(k, k, detuning_ * m);
      if (k + 1 < n_) {
        const double c = 0.5 * rabi_ * s * std::sqrt(j * (j + 1) - m * (m + 1));
        trip.emplace_back(k + 1, k, c);
        trip.emplace_back(k, k + 1, c);
      }
    }
    SparseH h(n_, n_);
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
  }
  SparseH structure() const override {
    SparseH h = at(0.0);
    for (int k = 0; k + 1 < n_; ++k) {
      h.coeffRef(k + 1, k) = 1.0;
      h.coeffRef(k, k + 1) = 1.0;
    }
    return h;
  }
  bool time_independent() const override { return envelope_.is_continuous(); }
  double rate_bound() const override { return std::max(std::abs(rabi_), std::abs(detuning_)); }
  std::vector<double> breakpoints() const override { return envelope_.breakpoints(); }

 private:
  int n_;
  double rabi_;
  double detuning_;
  PulseEnvelope envelope_;
};

}  // namespace rydcirc
