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

// Quantum-defect Stark model of an alkali Rydberg manifold.
//
// The basis holds every spherical state |n, l, m> whose effective quantum
// number n* = n - delta_l lies within half a unit of the window
// [n_center - (window-1)/2, n_center + (window-1)/2]. Each m block is
// diagonalized separately. An eigenstate belongs to the manifold carrying its
// largest weight; inside the centre manifold, parabolic labels are assigned as
//   n1 = (core-shifted states first, by energy) then the hydrogenic fan by energy,
// where the number of core-shifted states in a block is the number of
// core-shifted l series with l >= m.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rydcirc/constants.hpp"
#include "rydcirc/error.hpp"
#include "rydcirc/manifold/defects.hpp"
#include "rydcirc/manifold/radial.hpp"
#include "rydcirc/manifold/states.hpp"
#include "rydcirc/manifold/wigner.hpp"

namespace rydcirc {

struct RbBasisState {
  int n = 0;
  int l = 0;
  double n_star = 0.0;
  int manifold = 0;  ///< round(n*)
};

/// Static Stark eigenstates of one m block at one field.
struct StarkBlock {
  int m = 0;
  double field = 0.0;                ///< V/m
  Eigen::VectorXd energies;          ///< Hz, ascending
  Eigen::MatrixXd vectors;           ///< columns in the block's spherical basis
  std::vector<int> manifold;         ///< per eigenstate
  std::vector<int> n1;               ///< parabolic label in the centre manifold, -1 elsewhere
  std::vector<double> hydrogenic_weight;

  /// Eigenstate column for centre-manifold label n1, or -1.
  Eigen::Index column_of(int label) const {
    for (std::size_t k = 0; k < n1.size(); ++k)
      if (n1[k] == label) return static_cast<Eigen::Index>(k);
    return -1;
  }
  int centre_count() const {
    return static_cast<int>(std::count_if(n1.begin(), n1.end(), [](int v) { return v >= 0; }));
  }
};

struct StarkLevel {
  ParabolicState label;
  double energy_hz = 0.0;
  Eigen::VectorXd vector;
  double hydrogenic_weight = 0.0;
};

/// Window convergence diagnostics for the named levels.
struct ConvergenceReport {
  int window = 0;
  int larger_window = 0;
  double max_shift_hz = 0.0;
  std::vector<std::string> warnings;
};

class RbStarkModel {
 public:
  /// Spherical states of one m block and its field-free energies / z matrix.
  struct MBlock {
    int m = 0;
    std::vector<std::size_t> states;  ///< indices into basis()
    Eigen::VectorXd energy_hz;
    Eigen::MatrixXd z_hz;  ///< Hz per V/m
  };

  explicit RbStarkModel(int n_center, DefectTable defects = DefectTable::rubidium85(),
                        int window = 3, double rydberg_hz = rubidium85_rydberg_hz())
      : n_center_(n_center),
        defects_(std::move(defects)),
        window_(window),
        rydberg_hz_(rydberg_hz),
        radial_(std::make_shared<RadialSolver>()) {
    require(n_center >= 2, "Rb model needs n_center >= 2");
    require(window >= 1 && window % 2 == 1, "window must be an odd number of manifolds >= 1");
    defects_.validate();
    const int half = (window_ - 1) / 2;
    const double lo = n_center_ - half - 0.5;
    const double hi = n_center_ + half + 0.5;
    require(n_center_ - half >= 2, "window extends below n = 2");
    int max_shift = 0;
    for (double d : defects_.delta) max_shift = std::max(max_shift, static_cast<int>(std::ceil(d)));
    for (int n = 1; n <= n_center_ + half + max_shift + 1; ++n) {
      for (int l = 0; l < n; ++l) {
        const double ns = defects_.n_star(n, l);
        if (ns >= lo && ns < hi)
          basis_.push_back({n, l, ns, static_cast<int>(std::lround(ns))});
      }
    }
  }

  int n_center() const { return n_center_; }
  int window() const { return window_; }
  const DefectTable& defects() const { return defects_; }
  const std::vector<RbBasisState>& basis() const { return basis_; }

  std::shared_ptr<const MBlock> block(int m) const {
    require(m >= 0 && m < n_center_ + (window_ - 1) / 2, "m outside the basis");
    {
      const std::lock_guard<std::mutex> lock(mutex_);
      auto it = blocks_.find(m);
      if (it != blocks_.end()) return it->second;
    }
    auto b = std::make_shared<MBlock>();
    b->m = m;
    for (std::size_t a = 0; a < basis_.size(); ++a)
      if (basis_[a].l >= m) b->states.push_back(a);
    const auto dim = static_cast<Eigen::Index>(b->states.size());
    b->energy_hz.resize(dim);
    b->z_hz = Eigen::MatrixXd::Zero(dim, dim);
    const double unit = constants().dipole_hz_per_v_per_m();
    for (Eigen::Index a = 0; a < dim; ++a) {
      const auto& sa = basis_[b->states[a]];
      b->energy_hz(a) = -rydberg_hz_ / (sa.n_star * sa.n_star);
      for (Eigen::Index c = a + 1; c < dim; ++c) {
        const auto& sc = basis_[b->states[c]];
        if (std::abs(sa.l - sc.l) != 1) continue;
        const double v = unit * radial_->dipole(sa.n_star, sa.l, sc.n_star, sc.l) *
                         rank1_angular(sa.l, m, sc.l, m, 0);
        b->z_hz(a, c) = b->z_hz(c, a) = v;
      }
    }
    const std::lock_guard<std::mutex> lock(mutex_);
    return blocks_.emplace(m, b).first->second;
  }

  /// <block m+q | r C^1_q | block m> in units of a0 (q = +1 or -1).
  Eigen::MatrixXd rank1_matrix(int m, int q) const {
    require(q == 1 || q == -1, "q must be +1 or -1");
    const auto from = block(m);
    const auto to = block(m + q);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(to->states.size()),
                                                static_cast<Eigen::Index>(from->states.size()));
    for (std::size_t a = 0; a < to->states.size(); ++a) {
      const auto& sa = basis_[to->states[a]];
      for (std::size_t b = 0; b < from->states.size(); ++b) {
        const auto& sb = basis_[from->states[b]];
        if (std::abs(sa.l - sb.l) != 1) continue;
        out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            radial_->dipole(sa.n_star, sa.l, sb.n_star, sb.l) *
            rank1_angular(sa.l, m + q, sb.l, m, q);
      }
    }
    return out;
  }

  /// <block m+1| x + i y |block m> / a0  (x + i y = -sqrt(2) r C^1_{+1}).
  Eigen::MatrixXd r_plus(int m) const { return -std::sqrt(2.0) * rank1_matrix(m, 1); }

  StarkBlock diagonalize(int m, double field) const {
    const auto b = block(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        Eigen::MatrixXd(b->energy_hz.asDiagonal()) + field * b->z_hz);
    require(es.info() == Eigen::Success, "Stark diagonalization failed");
    StarkBlock out;
    out.m = m;
    out.field = field;
    out.energies = es.eigenvalues();
    out.vectors = es.eigenvectors();
    const auto dim = out.energies.size();
    out.manifold.assign(static_cast<std::size_t>(dim), 0);
    out.n1.assign(static_cast<std::size_t>(dim), -1);
    out.hydrogenic_weight.assign(static_cast<std::size_t>(dim), 0.0);
    std::vector<int> manifolds;
    for (auto idx : b->states) manifolds.push_back(basis_[idx].manifold);
    std::vector<int> keys = manifolds;
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::vector<Eigen::Index> centre;
    for (Eigen::Index k = 0; k < dim; ++k) {
      std::map<int, double> weight;
      double hw = 0.0;
      for (Eigen::Index a = 0; a < dim; ++a) {
        const double p = out.vectors(a, k) * out.vectors(a, k);
        weight[manifolds[static_cast<std::size_t>(a)]] += p;
        if (!defects_.core_shifted(basis_[b->states[static_cast<std::size_t>(a)]].l)) hw += p;
      }
      int best = keys.front();
      for (const auto& [mf, w] : weight)
        if (w > weight[best]) best = mf;
      out.manifold[static_cast<std::size_t>(k)] = best;
      out.hydrogenic_weight[static_cast<std::size_t>(k)] = hw;
      if (best == n_center_) centre.push_back(k);
    }
    const int n_core = core_count(m);
    std::vector<Eigen::Index> by_weight = centre;
    std::stable_sort(by_weight.begin(), by_weight.end(), [&](Eigen::Index a, Eigen::Index c) {
      return out.hydrogenic_weight[static_cast<std::size_t>(a)] <
             out.hydrogenic_weight[static_cast<std::size_t>(c)];
    });
    const auto nc = std::min<std::size_t>(static_cast<std::size_t>(n_core), by_weight.size());
    std::vector<Eigen::Index> core(by_weight.begin(), by_weight.begin() + static_cast<long>(nc));
    std::vector<Eigen::Index> fan(by_weight.begin() + static_cast<long>(nc), by_weight.end());
    std::sort(core.begin(), core.end());  // eigenvalues ascending -> energy order
    std::sort(fan.begin(), fan.end());
    int label = 0;
    for (auto k : core) out.n1[static_cast<std::size_t>(k)] = label++;
    for (auto k : fan) out.n1[static_cast<std::size_t>(k)] = label++;
    return out;
  }

  /// Number of core-shifted l series with l >= m.
  int core_count(int m) const {
    int count = 0;
    for (int l = m; l < static_cast<int>(defects_.delta.size()) && l < defects_.l_hydrogenic; ++l)
      if (defects_.core_shifted(l)) ++count;
    return count;
  }

  StarkLevel level(const ParabolicState& s, double field) const {
    require(s.valid() && s.n == n_center_, "level must belong to the centre manifold");
    require(s.m >= 0, "the Rb model stores m >= 0 blocks; use |m| for the mirror image");
    const auto blk = diagonalize(s.m, field);
    const auto col = blk.column_of(s.n1);
    if (col < 0)
      throw InvalidArgument("level " + to_string(s) + " not found in the centre manifold");
    return StarkLevel{s, blk.energies(col), blk.vectors.col(col),
                      blk.hydrogenic_weight[static_cast<std::size_t>(col)]};
  }

  /// E(b) - E(a), Hz.
  double transition_hz(const ParabolicState& a, const ParabolicState& b, double field) const {
    return level(b, field).energy_hz - level(a, field).energy_hz;
  }

  /// |<b| r C^1_q |a>| e a0 (C m) with q = m_b - m_a; for q = -1 this is d_ii' in
  /// Omega/2pi = sqrt(2) d E / h.
  double dipole_moment(const ParabolicState& a, const ParabolicState& b, double field) const {
    const int q = b.m - a.m;
    require(q == 1 || q == -1, "dipole_moment needs |m_b - m_a| = 1");
    const auto la = level(a, field);
    const auto lb = level(b, field);
    const double me = lb.vector.dot(rank1_matrix(a.m, q) * la.vector);
    const auto& c = constants();
    return std::abs(me) * c.e * c.a0;
  }

  /// Compares named-level energies against a model with two more manifolds.
  ConvergenceReport convergence(double field, const std::vector<ParabolicState>& levels,
                                double tolerance_hz = 0.5e6) const {
    ConvergenceReport rep;
    rep.window = window_;
    rep.larger_window = window_ + 2;
    const RbStarkModel larger(n_center_, defects_, window_ + 2, rydberg_hz_, radial_);
    for (const auto& s : levels) {
      const double shift =
          std::abs(larger.level(s, field).energy_hz - level(s, field).energy_hz);
      rep.max_shift_hz = std::max(rep.max_shift_hz, shift);
      if (shift > tolerance_hz) {
        std::ostringstream os;
        os << "level " << to_string(s) << " shifts by " << shift / 1e6 << " MHz when the window grows from "
           << window_ << " to " << window_ + 2 << " manifolds";
        rep.warnings.push_back(os.str());
      }
    }
    return rep;
  }

 private:
  RbStarkModel(int n_center, DefectTable defects, int window, double rydberg_hz,
               std::shared_ptr<RadialSolver> radial)
      : RbStarkModel(n_center, std::move(defects), window, rydberg_hz) {
    radial_ = std::move(radial);
  }

  int n_center_;
  DefectTable defects_;
  int window_;
  double rydberg_hz_;
  std::shared_ptr<RadialSolver> radial_;
  std::vector<RbBasisState> basis_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<const MBlock>> blocks_;
};

}  // namespace rydcirc
