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

// Unitary propagation of state vectors under a Generator.
//
// Both methods advance with a fourth-order commutator-free Magnus step built
// from two exact Hermitian exponentials, so every sub-step is unitary to
// round-off. Each exponential is computed by eigen-decomposition on the
// connected blocks of the generator's sparsity pattern. Time-independent
// generators are diagonalized once and evaluated at the grid times directly.

#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "rydcirc/dynamics/generator.hpp"
#include "rydcirc/error.hpp"

namespace rydcirc {

enum class PropagationMethod {
  kExactStep,  ///< fixed sub-steps <= 1/(substep_factor * rate / 2pi)
  kAdaptive,   ///< step doubling with local error control
};

struct PropagateOptions {
  PropagationMethod method = PropagationMethod::kExactStep;
  /// Sub-step is at most 2pi / (substep_factor * rate_bound()).
  double substep_factor = 50.0;
  /// Overrides the sub-step bound when > 0 (s).
  double max_substep = 0.0;
  double adaptive_tolerance = 1e-8;
  double norm_tolerance = 1e-6;
};

/// States at each requested time.
struct Evolution {
  std::vector<double> times;
  std::vector<CVector> states;
};

/// v <- exp(-i tau H) v for a dense Hermitian H.
inline void apply_hermitian_exp(const CMatrix& h, double tau, Eigen::Ref<CVector> v) {
  if (h.rows() == 1) {
    v(0) *= std::exp(cplx(0.0, -tau * h(0, 0).real()));
    return;
  }
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    const Eigen::MatrixXd& vecs = es.eigenvectors();
    CVector c = vecs.transpose() * v;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(cplx(0.0, -tau * es.eigenvalues()(k)));
    v = vecs * c;
    return;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CMatrix& vecs = es.eigenvectors();
  CVector c = vecs.adjoint() * v;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(cplx(0.0, -tau * es.eigenvalues()(k)));
  v = vecs * c;
}

/// Dense exp(-i tau H) for a Hermitian H.
inline CMatrix hermitian_exp(const CMatrix& h, double tau) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * cplx(0.0, -tau)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

namespace detail {

/// Block-diagonal view of a generator's coupling graph.
class BlockMap {
 public:
  explicit BlockMap(const SparseH& pattern) : blocks_(coupled_blocks(pattern)) {
    block_of_.assign(static_cast<std::size_t>(pattern.rows()), 0);
    local_.assign(static_cast<std::size_t>(pattern.rows()), 0);
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      for (std::size_t k = 0; k < blocks_[b].size(); ++k) {
        block_of_[blocks_[b][k]] = static_cast<Eigen::Index>(b);
        local_[blocks_[b][k]] = static_cast<Eigen::Index>(k);
      }
  }

  std::size_t size() const { return blocks_.size(); }
  const std::vector<Eigen::Index>& members(std::size_t b) const { return blocks_[b]; }

  std::vector<CMatrix> split(const SparseH& h) const {
    std::vector<CMatrix> out(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      out[b] = CMatrix::Zero(static_cast<Eigen::Index>(blocks_[b].size()),
                             static_cast<Eigen::Index>(blocks_[b].size()));
    for (Eigen::Index col = 0; col < h.outerSize(); ++col) {
      for (SparseH::InnerIterator it(h, col); it; ++it) {
        const auto b = block_of_[it.row()];
        if (block_of_[it.col()] != b)
          throw PropagationError("generator couples states outside its declared structure");
        out[b](local_[it.row()], local_[it.col()]) += it.value();
      }
    }
    return out;
  }

  CVector gather(const CVector& psi, std::size_t b) const {
    CVector out(static_cast<Eigen::Index>(blocks_[b].size()));
    for (std::size_t k = 0; k < blocks_[b].size(); ++k) out(k) = psi(blocks_[b][k]);
    return out;
  }
  void scatter(const CVector& part, std::size_t b, CVector& psi) const {
    for (std::size_t k = 0; k < blocks_[b].size(); ++k) psi(blocks_[b][k]) = part(k);
  }

 private:
  std::vector<std::vector<Eigen::Index>> blocks_;
  std::vector<Eigen::Index> block_of_;
  std::vector<Eigen::Index> local_;
};

inline void check_norm(const CVector& psi, double t, double tol) {
  const double norm = psi.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > tol) {
    std::ostringstream os;
    os << "norm drift " << std::abs(norm - 1.0) << " exceeds " << tol << " at t = " << t << " s";
    throw PropagationError(os.str());
  }
}

}  // namespace detail

/// Fourth-order commutator-free Magnus stepper reused across sub-steps.
class MagnusStepper {
 public:
  explicit MagnusStepper(const Generator& gen) : gen_(gen), blocks_(gen.structure()) {}

  /// psi <- U(t + h, t) psi.
  void step(double t, double h, CVector& psi) const {
    static const double kS3 = std::sqrt(3.0);
    static const double kC1 = 0.5 - kS3 / 6.0;
    static const double kC2 = 0.5 + kS3 / 6.0;
    static const double kA1 = (3.0 - 2.0 * kS3) / 12.0;
    static const double kA2 = (3.0 + 2.0 * kS3) / 12.0;
    const SparseH h1 = gen_.at(t + kC1 * h);
    const SparseH h2 = gen_.at(t + kC2 * h);
    const auto first = blocks_.split(SparseH(kA2 * h1 + kA1 * h2));
    const auto second = blocks_.split(SparseH(kA1 * h1 + kA2 * h2));
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      CVector part = blocks_.gather(psi, b);
      apply_hermitian_exp(first[b], h, part);
      apply_hermitian_exp(second[b], h, part);
      blocks_.scatter(part, b, psi);
    }
  }

  const detail::BlockMap& blocks() const { return blocks_; }

 private:
  const Generator& gen_;
  detail::BlockMap blocks_;
};

/// Sub-step bound from the generator's rate and the options.
inline double substep_bound(const Generator& gen, const PropagateOptions& opt) {
  if (opt.max_substep > 0) return opt.max_substep;
  const double rate = gen.rate_bound();
  if (!(rate > 0)) return std::numeric_limits<double>::infinity();
  return kTwoPi / (opt.substep_factor * rate);
}

/// Propagates psi0 from grid.front() through every grid time.
inline Evolution propagate(const Generator& gen, const CVector& psi0,
                           const std::vector<double>& grid, const PropagateOptions& opt = {}) {
  require(psi0.size() == gen.dim(), "initial state dimension does not match the generator");
  require(!grid.empty(), "time grid must not be empty");
  for (std::size_t k = 1; k < grid.size(); ++k)
    require(grid[k] > grid[k - 1], "time grid must be strictly increasing");
  require(std::abs(psi0.norm() - 1.0) < 1e-9, "initial state must be normalized");

  Evolution out;
  out.times = grid;
  out.states.reserve(grid.size());
  CVector psi = psi0;
  out.states.push_back(psi);
  if (grid.size() == 1) return out;

  if (gen.time_independent()) {
    detail::BlockMap blocks(gen.structure());
    const auto hb = blocks.split(gen.at(grid.front()));
    std::vector<Eigen::SelfAdjointEigenSolver<CMatrix>> solvers;
    std::vector<CVector> coeffs;
    solvers.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      solvers.emplace_back(hb[b]);
      coeffs.push_back(solvers[b].eigenvectors().adjoint() * blocks.gather(psi0, b));
    }
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double dt = grid[k] - grid.front();
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& es = solvers[b];
        CVector c = coeffs[b];
        for (Eigen::Index q = 0; q < c.size(); ++q)
          c(q) *= std::exp(cplx(0.0, -dt * es.eigenvalues()(q)));
        blocks.scatter(es.eigenvectors() * c, b, psi);
      }
      detail::check_norm(psi, grid[k], opt.norm_tolerance);
      out.states.push_back(psi);
    }
    return out;
  }

  const MagnusStepper stepper(gen);
  const double hmax = substep_bound(gen, opt);
  std::set<double> kinks;
  for (double b : gen.breakpoints())
    if (b > grid.front() && b < grid.back()) kinks.insert(b);

  double h_adaptive = std::min(hmax, grid.back() - grid.front());
  for (std::size_t k = 1; k < grid.size(); ++k) {
    std::vector<double> stops{grid[k - 1]};
    for (auto it = kinks.upper_bound(grid[k - 1]); it != kinks.end() && *it < grid[k]; ++it)
      stops.push_back(*it);
    stops.push_back(grid[k]);

    for (std::size_t s = 1; s < stops.size(); ++s) {
      const double a = stops[s - 1];
      const double span = stops[s] - a;
      if (opt.method == PropagationMethod::kExactStep) {
        const auto nsub = static_cast<long>(std::max(1.0, std::ceil(span / hmax - 1e-9)));
        const double h = span / static_cast<double>(nsub);
        for (long q = 0; q < nsub; ++q) stepper.step(a + static_cast<double>(q) * h, h, psi);
      } else {
        double t = a;
        int rejects = 0;
        while (t < stops[s] - 1e-18) {
          const double h = std::min(h_adaptive, stops[s] - t);
          CVector full = psi;
          stepper.step(t, h, full);
          CVector half = psi;
          stepper.step(t, 0.5 * h, half);
          stepper.step(t + 0.5 * h, 0.5 * h, half);
          const double err = (full - half).norm();
          const double tol = opt.adaptive_tolerance;
          const double scale = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
          if (err <= tol) {
            psi = half;
            t += h;
            h_adaptive = std::min(hmax * 16.0, h * std::min(4.0, scale));
            rejects = 0;
          } else {
            h_adaptive = h * std::max(0.2, scale);
            if (++rejects > 60) throw PropagationError("adaptive step size underflow");
          }
        }
      }
    }
    detail::check_norm(psi, grid[k], opt.norm_tolerance);
    out.states.push_back(psi);
  }
  return out;
}

/// Final state only.
inline CVector propagate_to(const Generator& gen, const CVector& psi0, double t0, double t1,
                            const PropagateOptions& opt = {}) {
  if (t1 <= t0) return psi0;
  return propagate(gen, psi0, {t0, t1}, opt).states.back();
}

inline CVector basis_state(Eigen::Index dim, Eigen::Index index) {
  CVector v = CVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

}  // namespace rydcirc
