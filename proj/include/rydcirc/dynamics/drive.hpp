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

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "rydcirc/constants.hpp"
#include "rydcirc/error.hpp"

namespace rydcirc {

using cplx = std::complex<double>;

enum class RampShape { kLinear, kCosine };

/// Normalized RF amplitude envelope: rise, flat hold, fall; zero outside.
struct PulseEnvelope {
  double rise = 0.0;  ///< s
  double hold = std::numeric_limits<double>::infinity();  ///< s
  double fall = 0.0;  ///< s
  RampShape shape = RampShape::kLinear;
  /// Flat reduction applied to a nominal pulse length (rise/fall of the electronics).
  double duration_correction = -68e-9;

  static PulseEnvelope continuous() { return PulseEnvelope{}; }

  static PulseEnvelope square(double duration) {
    PulseEnvelope p;
    p.hold = duration;
    return p;
  }

  static PulseEnvelope ramped(double rise, double hold, double fall,
                              RampShape shape = RampShape::kLinear) {
    PulseEnvelope p;
    p.rise = rise;
    p.hold = hold;
    p.fall = fall;
    p.shape = shape;
    return p;
  }

  void validate() const {
    require(rise >= 0 && hold >= 0 && fall >= 0, "envelope times must be non-negative");
  }

  bool is_continuous() const { return std::isinf(hold) && rise == 0.0; }
  double total() const { return rise + hold + fall; }

  /// Nominal length corrected by duration_correction, clamped at zero.
  double effective_duration(double nominal) const {
    return std::max(0.0, nominal + duration_correction);
  }

  double amplitude(double t) const {
    if (is_continuous()) return 1.0;
    if (t < 0.0) return 0.0;
    if (t < rise) return ramp(t / rise);
    t -= rise;
    if (t <= hold) return 1.0;
    t -= hold;
    if (t < fall) return ramp(1.0 - t / fall);
    return 0.0;
  }

  /// Times at which the envelope has kinks; propagators align sub-steps to them.
  std::vector<double> breakpoints() const {
    if (is_continuous()) return {};
    std::vector<double> out{0.0, rise};
    if (std::isfinite(hold)) {
      out.push_back(rise + hold);
      out.push_back(rise + hold + fall);
    }
    return out;
  }

 private:
  double ramp(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    return shape == RampShape::kLinear ? x : 0.5 * (1.0 - std::cos(kPi * x));
  }
};

/// RF field driving the manifold: sigma+/sigma- complex amplitudes and carrier.
///
/// The sigma+ component is Re[E+ e^{-i w t} (x + i y)], the sigma- component is
/// Re[E- e^{-i w t} (x - i y)].
struct DriveConfig {
  double omega_rf = kTwoPi * 230e6;  ///< rad/s
  cplx e_plus{0.0, 0.0};             ///< V/m
  cplx e_minus{0.0, 0.0};            ///< V/m
  PulseEnvelope envelope = PulseEnvelope::continuous();

  void validate() const {
    envelope.validate();
    if (std::abs(e_plus) > 0 || std::abs(e_minus) > 0)
      require(omega_rf > 0, "omega_rf must be positive when the drive is on");
  }
};

/// Piecewise-linear static field: hold F_start, ramp to F_end, hold F_end.
struct FieldRamp {
  double f_start = 245.0;     ///< V/m
  double f_end = 224.0;       ///< V/m
  double duration = 1.5e-6;   ///< s
  double pre_hold = 1.0e-6;   ///< s
  double post_hold = 1.0e-6;  ///< s

  static FieldRamp constant(double f) {
    FieldRamp r;
    r.f_start = r.f_end = f;
    return r;
  }

  void validate() const {
    require(duration > 0, "field ramp duration must be positive");
    require(pre_hold >= 0 && post_hold >= 0, "field ramp holds must be non-negative");
  }

  double total() const { return pre_hold + duration + post_hold; }

  double at(double t) const {
    if (t <= pre_hold) return f_start;
    if (t >= pre_hold + duration) return f_end;
    return f_start + (f_end - f_start) * (t - pre_hold) / duration;
  }

  std::vector<double> breakpoints() const { return {pre_hold, pre_hold + duration}; }
};

}  // namespace rydcirc
