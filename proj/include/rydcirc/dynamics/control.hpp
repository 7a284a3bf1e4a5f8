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

// Rotating-frame Hamiltonians linear in the two rf control handles.
//
//   H(Omega, delta, phi) = H_d + (delta - delta_0) N + Omega (e^{i phi} R + e^{-i phi} R^dagger)
//
// delta is the ladder detuning w_n - w_rf; changing it at fixed static field
// shifts the rf frequency, which enters through -w_rf M = (delta - w_n) M, so N
// is diagonal in m. R is the sigma+ raising part per unit ladder Rabi frequency.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rydcirc/dynamics/generator.hpp"
#include "rydcirc/dynamics/rb_dynamics.hpp"
#include "rydcirc/dynamics/trajectory.hpp"
#include "rydcirc/manifold/hydrogen.hpp"
#include "rydcirc/manifold/named_levels.hpp"

namespace rydcirc {

struct ControlSystem {
  std::string model;     ///< "hydrogen" or "rb"
  int n = 0;
  SparseH drift;         ///< rad/s at delta_0 with the drive off
  double delta_0 = 0.0;  ///< rad/s
  SparseH number;        ///< coefficient of delta (diagonal)
  SparseH raise;         ///< sigma+ raising part per unit Omega
  Eigen::Index initial = 0;
  Eigen::Index target = 0;
  LevelMap levels{};
  std::vector<std::string> labels;

  Eigen::Index dim() const { return drift.rows(); }

  SparseH hamiltonian(double omega, double delta, double phase = 0.0) const {
    const cplx c = omega * std::exp(cplx(0.0, phase));
    SparseH h = drift;
    if (delta != delta_0) h += (delta - delta_0) * number;
    if (omega != 0.0) h += c * raise + std::conj(c) * SparseH(raise.adjoint());
    return h;
  }
};

/// Constant-control generator over a ControlSystem.
class ControlGenerator final : public Generator {
 public:
  ControlGenerator(std::shared_ptr<const ControlSystem> sys, double omega, double delta,
                   double phase = 0.0)
      : sys_(std::move(sys)), omega_(omega), delta_(delta), phase_(phase) {}

  Eigen::Index dim() const override { return sys_->dim(); }
  SparseH at(double) const override { return sys_->hamiltonian(omega_, delta_, phase_); }
  SparseH structure() const override {
    SparseH h = sys_->hamiltonian(1.0, sys_->delta_0 + 1.0);
    for (Eigen::Index col = 0; col < h.outerSize(); ++col)
      for (SparseH::InnerIterator it(h, col); it; ++it) it.valueRef() = 1.0;
    return h;
  }
  bool time_independent() const override { return true; }
  double rate_bound() const override { return std::max(std::abs(omega_), std::abs(delta_)); }
  std::vector<std::string> labels() const override { return sys_->labels; }

 private:
  std::shared_ptr<const ControlSystem> sys_;
  double omega_;
  double delta_;
  double phase_;
};

/// The n1 = 0 ladder of hydrogen manifold n (closed under sigma+ in the co-rotating
/// approximation): H = delta Jz + Omega Jx, from m = 0 to the circular level.
inline ControlSystem hydrogen_ladder_system(int n, double delta_0 = 0.0) {
  require(n >= 7, "hydrogen ladder system needs n >= 7");
  ControlSystem sys;
  sys.model = "hydrogen";
  sys.n = n;
  sys.delta_0 = delta_0;
  const double j = 0.5 * (n - 1);
  std::vector<Eigen::Triplet<cplx>> tn, tr;
  for (int k = 0; k < n; ++k) {
    const double mj = -j + k;
    tn.emplace_back(k, k, mj);
    if (k + 1 < n) tr.emplace_back(k + 1, k, 0.5 * std::sqrt(j * (j + 1) - mj * (mj + 1)));
    sys.labels.push_back(to_string(ParabolicState::make(n, 0, k)));
  }
  sys.number.resize(n, n);
  sys.number.setFromTriplets(tn.begin(), tn.end());
  sys.drift = delta_0 * sys.number;
  sys.raise.resize(n, n);
  sys.raise.setFromTriplets(tr.begin(), tr.end());
  sys.initial = 0;
  sys.target = n - 1;
  for (std::size_t q = 0; q < kNamedLevels.size(); ++q) {
    const auto s = resolve(kNamedLevels[q], n);
    if (s.n1 == 0) sys.levels[q] = s.m;
  }
  return sys;
}

/// Truncated Rb model around a Stark eigenbasis; initial |i>, target |c>.
inline ControlSystem rb_control_system(const RbTransferBasis& basis) {
  const int n = basis.model().n_center();
  ControlSystem sys;
  sys.model = "rb";
  sys.n = n;
  const auto dim = basis.dim();
  sys.delta_0 = stark_frequency(n, basis.options().reference_field) - basis.options().omega_rf;
  std::vector<Eigen::Triplet<cplx>> td, tn;
  const int m_i = resolve(NamedLevel::kI, n).m;
  for (Eigen::Index a = 0; a < dim; ++a) {
    td.emplace_back(a, a, kTwoPi * basis.rotating_hz()[static_cast<std::size_t>(a)]);
    tn.emplace_back(a, a, static_cast<double>(basis.states()[static_cast<std::size_t>(a)].m - m_i));
    sys.labels.push_back(to_string(basis.states()[static_cast<std::size_t>(a)]));
  }
  sys.drift.resize(dim, dim);
  sys.drift.setFromTriplets(td.begin(), td.end());
  sys.number.resize(dim, dim);
  sys.number.setFromTriplets(tn.begin(), tn.end());
  const double per_field = kTwoPi / ladder_rabi_frequency(n, 1.0);
  sys.raise = (per_field * basis.raise_hz()).cast<cplx>();
  sys.initial = *basis.index_of(resolve(NamedLevel::kI, n));
  sys.target = *basis.index_of(resolve(NamedLevel::kC, n));
  for (std::size_t q = 0; q < kNamedLevels.size(); ++q)
    sys.levels[q] = basis.index_of(resolve(kNamedLevels[q], n));
  return sys;
}

}  // namespace rydcirc
