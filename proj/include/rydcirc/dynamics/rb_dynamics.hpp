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

// sigma+ driven dynamics of the Rb centre manifold.
//
// The dynamical basis is the set of centre-manifold Stark eigenstates at a
// reference field F_ref with m >= m_min whose energy in the frame rotating at
// w_rf lies within a cutoff of |i>. In that frame the sigma+ field is static,
// so with C_m the eigenvector columns of block m
//   H/h = diag(E_k - f_rf m_k - E_i) + (F - F_ref) C^T Z C
//         + a(t) [E+ (e a0 / 2h) C_{m+1}^T R+ C_m + h.c.]
// where R+ is <m+1| x + i y |m> in the spherical basis.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rydcirc/constants.hpp"
#include "rydcirc/dynamics/drive.hpp"
#include "rydcirc/dynamics/generator.hpp"
#include "rydcirc/manifold/hydrogen.hpp"
#include "rydcirc/manifold/named_levels.hpp"
#include "rydcirc/manifold/rb_stark.hpp"

namespace rydcirc {

struct RbDynamicsOptions {
  double reference_field = 234.5;      ///< V/m
  double omega_rf = kTwoPi * 230e6;    ///< rad/s, frame rotation
  double cutoff_hz = 0.6e9;            ///< rotating-frame energy window around |i>
  int m_min = 2;
};

/// Truncated Stark eigenbasis with its static, field-gradient and coupling matrices.
class RbTransferBasis {
 public:
  RbTransferBasis(std::shared_ptr<const RbStarkModel> model, RbDynamicsOptions opt = {})
      : model_(std::move(model)), opt_(opt) {
    require(model_ != nullptr, "RbTransferBasis needs a Stark model");
    require(opt_.cutoff_hz > 0, "cutoff must be positive");
    require(opt_.omega_rf > 0, "omega_rf must be positive");
    const int n = model_->n_center();
    require(opt_.m_min >= 0 && opt_.m_min <= 2, "m_min must lie in [0, 2] to contain |i>");
    const double f_rf = opt_.omega_rf / kTwoPi;
    const ParabolicState i_state = resolve(NamedLevel::kI, n);

    std::map<int, StarkBlock> blocks;
    for (int m = opt_.m_min; m < n; ++m) blocks.emplace(m, model_->diagonalize(m, opt_.reference_field));
    {
      const auto& bi = blocks.at(i_state.m);
      const auto col = bi.column_of(i_state.n1);
      require(col >= 0, "initial level not found in the Stark model");
      e_ref_ = bi.energies(col) - f_rf * i_state.m;
    }
    std::vector<ParabolicState> keep;
    for (auto p : kNamedLevels) {
      const auto s = resolve(p, n);
      if (s.m >= opt_.m_min) keep.push_back(s);
    }
    std::map<int, std::vector<Eigen::Index>> cols;
    for (auto& [m, blk] : blocks) {
      for (Eigen::Index k = 0; k < blk.energies.size(); ++k) {
        const int n1 = blk.n1[static_cast<std::size_t>(k)];
        if (n1 < 0) continue;
        const double rot = blk.energies(k) - f_rf * m - e_ref_;
        const auto s = ParabolicState::make(n, n1, m);
        const bool named = std::find(keep.begin(), keep.end(), s) != keep.end();
        if (std::abs(rot) < opt_.cutoff_hz || named) {
          states_.push_back(s);
          rotating_hz_.push_back(rot);
          cols[m].push_back(k);
        }
      }
    }
    const auto dim = static_cast<Eigen::Index>(states_.size());
    std::vector<Eigen::Triplet<double>> tb, tx;
    Eigen::Index offset = 0;
    std::map<int, Eigen::Index> first;
    for (const auto& [m, c] : cols) {
      first[m] = offset;
      offset += static_cast<Eigen::Index>(c.size());
    }
    const double unit = constants().dipole_hz_per_v_per_m();
    for (const auto& [m, c] : cols) {
      const auto& blk = blocks.at(m);
      Eigen::MatrixXd cm(blk.vectors.rows(), static_cast<Eigen::Index>(c.size()));
      for (std::size_t q = 0; q < c.size(); ++q) cm.col(static_cast<Eigen::Index>(q)) = blk.vectors.col(c[q]);
      const Eigen::MatrixXd zb = cm.transpose() * model_->block(m)->z_hz * cm;
      for (Eigen::Index a = 0; a < zb.rows(); ++a)
        for (Eigen::Index b = 0; b < zb.cols(); ++b)
          if (zb(a, b) != 0.0) tb.emplace_back(first[m] + a, first[m] + b, zb(a, b));
      const auto up = cols.find(m + 1);
      if (up == cols.end()) continue;
      const auto& blk2 = blocks.at(m + 1);
      Eigen::MatrixXd cm2(blk2.vectors.rows(), static_cast<Eigen::Index>(up->second.size()));
      for (std::size_t q = 0; q < up->second.size(); ++q)
        cm2.col(static_cast<Eigen::Index>(q)) = blk2.vectors.col(up->second[q]);
      const Eigen::MatrixXd xb = 0.5 * unit * (cm2.transpose() * model_->r_plus(m) * cm);
      for (Eigen::Index a = 0; a < xb.rows(); ++a)
        for (Eigen::Index b = 0; b < xb.cols(); ++b)
          if (xb(a, b) != 0.0) tx.emplace_back(first[m + 1] + a, first[m] + b, xb(a, b));
    }
    gradient_hz_.resize(dim, dim);
    gradient_hz_.setFromTriplets(tb.begin(), tb.end());
    raise_hz_.resize(dim, dim);
    raise_hz_.setFromTriplets(tx.begin(), tx.end());
  }

  const RbStarkModel& model() const { return *model_; }
  const RbDynamicsOptions& options() const { return opt_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(states_.size()); }
  const std::vector<ParabolicState>& states() const { return states_; }
  /// Rotating-frame energies relative to |i> at the reference field, Hz.
  const std::vector<double>& rotating_hz() const { return rotating_hz_; }
  /// d(H/h)/dF in the truncated basis, Hz per V/m.
  const Eigen::SparseMatrix<double>& gradient_hz() const { return gradient_hz_; }
  /// sigma+ raising part per unit E+, Hz per V/m (to row m+1 from column m).
  const Eigen::SparseMatrix<double>& raise_hz() const { return raise_hz_; }

  std::optional<Eigen::Index> index_of(const ParabolicState& s) const {
    const auto it = std::find(states_.begin(), states_.end(), s);
    if (it == states_.end()) return std::nullopt;
    return static_cast<Eigen::Index>(it - states_.begin());
  }

  /// Field amplitude E+ (V/m) for a nominal ladder Rabi frequency; uses the hydrogen relation.
  double field_for_rabi(double omega) const { return ladder_field_for_rabi(model_->n_center(), omega); }

 private:
  std::shared_ptr<const RbStarkModel> model_;
  RbDynamicsOptions opt_;
  double e_ref_ = 0.0;
  std::vector<ParabolicState> states_;
  std::vector<double> rotating_hz_;
  Eigen::SparseMatrix<double> gradient_hz_;
  Eigen::SparseMatrix<double> raise_hz_;
};

/// Generator of the truncated Rb model under a field ramp and a sigma+ drive.
class RbGenerator final : public Generator {
 public:
  RbGenerator(std::shared_ptr<const RbTransferBasis> basis, FieldRamp ramp, cplx e_plus,
              PulseEnvelope envelope, bool ramped = true)
      : basis_(std::move(basis)), ramp_(ramp), ramped_(ramped), e_plus_(e_plus), envelope_(envelope) {
    require(basis_ != nullptr, "RbGenerator needs a basis");
    if (ramped_) ramp_.validate();
    envelope_.validate();
    const auto dim = basis_->dim();
    static_.resize(dim, dim);
    std::vector<Eigen::Triplet<cplx>> t;
    for (Eigen::Index a = 0; a < dim; ++a)
      t.emplace_back(a, a, kTwoPi * basis_->rotating_hz()[static_cast<std::size_t>(a)]);
    static_.setFromTriplets(t.begin(), t.end());
    gradient_ = (kTwoPi * basis_->gradient_hz()).cast<cplx>();
    raise_ = (kTwoPi * basis_->raise_hz()).cast<cplx>();
    lower_ = SparseH(raise_.adjoint());
  }

  static RbGenerator constant(std::shared_ptr<const RbTransferBasis> basis, double field,
                              cplx e_plus, PulseEnvelope envelope = PulseEnvelope::continuous()) {
    return RbGenerator(std::move(basis), FieldRamp::constant(field), e_plus, envelope, false);
  }

  Eigen::Index dim() const override { return basis_->dim(); }

  SparseH at(double t) const override {
    const double df = ramp_.at(t) - basis_->options().reference_field;
    const cplx amp = envelope_.amplitude(t) * e_plus_;
    SparseH h = static_;
    if (df != 0.0) h += df * gradient_;
    if (amp != 0.0) h += amp * raise_ + std::conj(amp) * lower_;
    return h;
  }

  SparseH structure() const override {
    SparseH h = static_;
    h += gradient_;
    if (std::abs(e_plus_) > 0) h += raise_ + lower_;
    for (Eigen::Index col = 0; col < h.outerSize(); ++col)
      for (SparseH::InnerIterator it(h, col); it; ++it) it.valueRef() = 1.0;
    return h;
  }

  bool time_independent() const override { return !ramped_ && envelope_.is_continuous(); }

  double rate_bound() const override {
    const int n = basis_->model().n_center();
    const double w = basis_->options().omega_rf;
    const double d1 = std::abs(stark_frequency(n, std::abs(ramp_.f_start)) - w);
    const double d2 = std::abs(stark_frequency(n, std::abs(ramp_.f_end)) - w);
    return std::max({ladder_rabi_frequency(n, std::abs(e_plus_)), d1, d2});
  }

  std::vector<double> breakpoints() const override {
    auto out = envelope_.breakpoints();
    if (ramped_)
      for (double b : ramp_.breakpoints()) out.push_back(b);
    return out;
  }

  std::vector<std::string> labels() const override {
    std::vector<std::string> out;
    for (const auto& s : basis_->states()) out.push_back(to_string(s));
    return out;
  }

 private:
  std::shared_ptr<const RbTransferBasis> basis_;
  FieldRamp ramp_;
  bool ramped_;
  cplx e_plus_;
  PulseEnvelope envelope_;
  SparseH static_;
  SparseH gradient_;
  SparseH raise_;
  SparseH lower_;
};

}  // namespace rydcirc
