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

// Radial wavefunctions at non-integer effective quantum number n*.
//
// Numerov integration of the Coulomb radial equation at energy -1/(2 n*^2)
// on the square-root grid x = sqrt(r), where with R(r) = y(x) x^{-3/2}
//   y'' = [8 x^2 (V - E) + (2l + 1/2)(2l + 3/2) / x^2] y,   V = -1/r.
// Integration runs inward from r_out = 2 n* (n* + 15) and stops inside the
// inner turning point as soon as the solution starts to grow, which removes
// the divergent core region that the quantum defect already accounts for.

#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "rydcirc/error.hpp"

namespace rydcirc {

struct RadialWavefunction {
  double n_star = 0.0;
  int l = 0;
  double step = 0.01;     ///< grid spacing in x
  std::vector<double> y;  ///< y at x_k = (k + 1) step, normalized: 2 int x^2 y^2 dx = 1
};

inline RadialWavefunction numerov_wavefunction(double n_star, int l, double step = 0.01) {
  require(n_star > 0 && l >= 0 && l < n_star + 1.0, "radial wavefunction needs 0 <= l < n*");
  require(step > 0, "radial grid step must be positive");
  const double x_out = std::sqrt(2.0 * n_star * (n_star + 15.0));
  const auto count = static_cast<std::size_t>(x_out / step);
  const double energy = -0.5 / (n_star * n_star);
  const double cent = (2.0 * l + 0.5) * (2.0 * l + 1.5);
  auto g = [&](std::size_t k) {
    const double x = step * static_cast<double>(k + 1);
    return 8.0 * x * x * (-1.0 / (x * x) - energy) + cent / (x * x);
  };
  const double r_tp = n_star * n_star *
                      (1.0 - std::sqrt(std::max(0.0, 1.0 - l * (l + 1.0) / (n_star * n_star))));

  RadialWavefunction wf;
  wf.n_star = n_star;
  wf.l = l;
  wf.step = step;
  wf.y.assign(count, 0.0);
  const double c = step * step / 12.0;
  wf.y[count - 1] = 1e-20;
  wf.y[count - 2] = 1e-20 * (1.0 + step * std::sqrt(-8.0 * energy) * x_out);
  for (std::size_t i = count - 2; i >= 1; --i) {
    const double next = (2.0 * (1.0 + 5.0 * c * g(i)) * wf.y[i] - (1.0 - c * g(i + 1)) * wf.y[i + 1]) /
                        (1.0 - c * g(i - 1));
    wf.y[i - 1] = next;
    const double x = step * static_cast<double>(i);
    if (x * x < r_tp && std::abs(next) > std::abs(wf.y[i])) {
      for (std::size_t k = 0; k < i; ++k) wf.y[k] = 0.0;
      break;
    }
  }
  double norm = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double x = step * static_cast<double>(k + 1);
    norm += x * x * wf.y[k] * wf.y[k];
  }
  norm = std::sqrt(2.0 * norm * step);
  for (double& v : wf.y) v /= norm;
  return wf;
}

/// <a| r^power |b> in atomic units on the common grid (power 1 for the dipole).
inline double radial_integral(const RadialWavefunction& a, const RadialWavefunction& b,
                              int power = 1) {
  require(a.step == b.step, "radial integrals need a common grid");
  const std::size_t count = std::min(a.y.size(), b.y.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double x = a.step * static_cast<double>(k + 1);
    sum += std::pow(x, 2 + 2 * power) * a.y[k] * b.y[k];
  }
  return 2.0 * sum * a.step;
}

/// Thread-safe memo of wavefunctions keyed by (n*, l).
class RadialSolver {
 public:
  explicit RadialSolver(double step = 0.01) : step_(step) {}

  std::shared_ptr<const RadialWavefunction> wavefunction(double n_star, int l) const {
    const std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_pair(n_star, l);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto wf = std::make_shared<const RadialWavefunction>(numerov_wavefunction(n_star, l, step_));
    cache_.emplace(key, wf);
    return wf;
  }

  /// Dipole radial integral <n*_a l_a| r |n*_b l_b> in units of a0.
  double dipole(double ns_a, int l_a, double ns_b, int l_b) const {
    return radial_integral(*wavefunction(ns_a, l_a), *wavefunction(ns_b, l_b), 1);
  }

 private:
  double step_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, int>, std::shared_ptr<const RadialWavefunction>> cache_;
};

}  // namespace rydcirc
