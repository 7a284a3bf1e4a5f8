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

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "rydcirc/dynamics/drive.hpp"

namespace rydcirc {

using SparseH = Eigen::SparseMatrix<cplx>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Time-dependent Hamiltonian H(t)/hbar in rad/s over a fixed labelled basis.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual Eigen::Index dim() const = 0;
  virtual SparseH at(double t) const = 0;
  /// Superset of the sparsity pattern of at(t) for every t.
  virtual SparseH structure() const = 0;
  virtual bool time_independent() const { return false; }
  /// Largest angular-frequency scale steering the sub-step size.
  virtual double rate_bound() const = 0;
  /// Kinks in the time dependence (envelope corners, ramp ends).
  virtual std::vector<double> breakpoints() const { return {}; }
  /// Human-readable label of each basis state.
  virtual std::vector<std::string> labels() const {
    std::vector<std::string> out(static_cast<std::size_t>(dim()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::to_string(i);
    return out;
  }
};

/// Connected components of the coupling graph of a sparse matrix.
inline std::vector<std::vector<Eigen::Index>> coupled_blocks(const SparseH& pattern) {
  const Eigen::Index n = pattern.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (Eigen::Index col = 0; col < pattern.outerSize(); ++col) {
    for (SparseH::InnerIterator it(pattern, col); it; ++it) {
      const auto a = find(it.row());
      const auto b = find(it.col());
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> block_of(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = find(i);
    if (block_of[r] < 0) {
      block_of[r] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[block_of[r]].push_back(i);
  }
  return blocks;
}

/// max |H - H^dagger| relative to the largest |H_ab|.
inline double hermiticity_defect(const SparseH& h) {
  const SparseH diff = SparseH(h - SparseH(h.adjoint()));
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index col = 0; col < diff.outerSize(); ++col)
    for (SparseH::InnerIterator it(diff, col); it; ++it) num = std::max(num, std::abs(it.value()));
  for (Eigen::Index col = 0; col < h.outerSize(); ++col)
    for (SparseH::InnerIterator it(h, col); it; ++it) den = std::max(den, std::abs(it.value()));
  return den > 0 ? num / den : num;
}

/// Two-level system |0>, |1> with detuning and (optionally time-dependent) Rabi coupling.
class TwoLevelGenerator final : public Generator {
 public:
  TwoLevelGenerator(double rabi, double detuning,
                    PulseEnvelope envelope = PulseEnvelope::continuous())
      : rabi_(rabi), detuning_(detuning), envelope_(envelope) {}

  Eigen::Index dim() const override { return 2; }
  SparseH at(double t) const override {
    const double a = envelope_.amplitude(t);
    SparseH h(2, 2);
    std::vector<Eigen::Triplet<cplx>> trip{{0, 0, -0.5 * detuning_},
                                           {1, 1, 0.5 * detuning_},
                                           {0, 1, 0.5 * rabi_ * a},
                                           {1, 0, 0.5 * rabi_ * a}};
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
  }
  SparseH structure() const override {
    SparseH h(2, 2);
    std::vector<Eigen::Triplet<cplx>> trip{{0, 0, 1.0}, {1, 1, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}};
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
  }
  bool time_independent() const override { return envelope_.is_continuous(); }
  double rate_bound() const override { return std::max(std::abs(rabi_), std::abs(detuning_)); }
  std::vector<double> breakpoints() const override { return envelope_.breakpoints(); }

 private:
  double rabi_;
  double detuning_;
  PulseEnvelope envelope_;
};

/// Wraps a fixed dense Hermitian matrix.
class StaticGenerator final : public Generator {
 public:
  explicit StaticGenerator(CMatrix h) : h_(std::move(h)) {}
  Eigen::Index dim() const override { return h_.rows(); }
  SparseH at(double) const override { return h_.sparseView(); }
  SparseH structure() const override { return h_.sparseView(); }
  bool time_independent() const override { return true; }
  double rate_bound() const override { return h_.cwiseAbs().maxCoeff(); }

 private:
  CMatrix h_;
};

}  // namespace rydcirc
