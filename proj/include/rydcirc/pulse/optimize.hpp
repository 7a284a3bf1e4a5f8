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

// Optimal control of piecewise-constant schedules.
//
// Controls are normalized to the unit box: Omega = x Omega_max,
// delta = (2x - 1) delta_max and, with free durations, tau = x T_budget.
//
// Gradient: with H = V diag(l) V^dagger and U = exp(-i tau H),
//   dU = V (Phi o (V^dagger dH V)) V^dagger,
//   Phi_ab = -i tau exp(-i tau (l_a + l_b)/2) sinc(tau (l_a - l_b)/2),
// which equals the divided difference of exp(-i tau l) and stays exact for
// degenerate pairs. dF = 2 Re(conj(a) <chi_k| dU_k |psi_{k-1}>) with a the
// final target amplitude, psi forward and chi backward-propagated.

#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "rydcirc/dynamics/control.hpp"
#include "rydcirc/error.hpp"
#include "rydcirc/pulse/schedule.hpp"
#include "rydcirc/util/parallel.hpp"

namespace rydcirc {

enum class OptimizerMethod { kGradient, kDerivativeFree };

inline std::string to_string(OptimizerMethod m) {
  return m == OptimizerMethod::kGradient ? "gradient" : "derivative-free";
}
inline OptimizerMethod optimizer_method_from(const std::string& s) {
  if (s == "gradient" || s == "grape") return OptimizerMethod::kGradient;
  if (s == "derivative-free" || s == "nelder-mead") return OptimizerMethod::kDerivativeFree;
  throw InvalidArgument("unknown optimizer method '" + s + "' (expected gradient or derivative-free)");
}

struct OptimizeOptions {
  OptimizerMethod method = OptimizerMethod::kGradient;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-6;  ///< on the projected gradient in normalized variables
  double gain_tolerance = 1e-8;      ///< per accepted step
  bool free_durations = false;
  double simplex_tolerance = 1e-7;   ///< derivative-free: characteristic simplex size
  double simplex_step = 0.3;
};

struct OptimizationReport {
  std::string method;
  std::vector<double> fidelity_trace;  ///< after each accepted step, starting with the initial value
  std::vector<double> gradient_norms;  ///< projected gradient norm at each accepted point
  PulseSchedule schedule;
  double fidelity = 0.0;
  int iterations = 0;
  int evaluations = 0;
  std::string termination;
};

/// Fidelity and exact gradient in normalized variables.
class GrapeObjective {
 public:
  GrapeObjective(std::shared_ptr<const ControlSystem> sys, PulseSchedule shape, bool free_durations)
      : sys_(std::move(sys)), shape_(std::move(shape)), free_(free_durations) {
    shape_.validate();
    raise_ = sys_->raise;
    raise_adj_ = SparseH(sys_->raise.adjoint());
    number_ = sys_->number;
  }

  std::size_t segments() const { return shape_.size(); }
  std::size_t per_segment() const { return free_ ? 3 : 2; }
  std::size_t size() const { return segments() * per_segment(); }
  const ScheduleBounds& bounds() const { return shape_.bounds; }
  bool free_durations() const { return free_; }

  Eigen::VectorXd encode(const PulseSchedule& s) const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(size()));
    const auto& b = shape_.bounds;
    for (std::size_t k = 0; k < segments(); ++k) {
      const auto q = static_cast<Eigen::Index>(k * per_segment());
      x(q) = s.omega[k] / b.omega_max;
      x(q + 1) = b.delta_max > 0 ? 0.5 * (s.delta[k] / b.delta_max + 1.0) : 0.5;
      if (free_) x(q + 2) = s.duration[k] / b.time_budget;
    }
    return x;
  }

  PulseSchedule decode(const Eigen::VectorXd& x) const {
    PulseSchedule s = shape_;
    const auto& b = shape_.bounds;
    for (std::size_t k = 0; k < segments(); ++k) {
      const auto q = static_cast<Eigen::Index>(k * per_segment());
      s.omega[k] = std::clamp(x(q), 0.0, 1.0) * b.omega_max;
      s.delta[k] = (2.0 * std::clamp(x(q + 1), 0.0, 1.0) - 1.0) * b.delta_max;
      if (free_) s.duration[k] = x(q + 2) * b.time_budget;
    }
    return s;
  }

  /// Euclidean projection onto the feasible set.
  Eigen::VectorXd project(Eigen::VectorXd x) const {
    for (std::size_t k = 0; k < segments(); ++k) {
      const auto q = static_cast<Eigen::Index>(k * per_segment());
      x(q) = std::clamp(x(q), 0.0, 1.0);
      x(q + 1) = std::clamp(x(q + 1), 0.0, 1.0);
    }
    if (free_) {
      const double lo = shape_.bounds.min_duration / shape_.bounds.time_budget;
      std::vector<double> t(segments());
      for (std::size_t k = 0; k < segments(); ++k) t[k] = x(static_cast<Eigen::Index>(k * 3 + 2));
      t = project_durations(t, lo);
      for (std::size_t k = 0; k < segments(); ++k) x(static_cast<Eigen::Index>(k * 3 + 2)) = t[k];
    }
    return x;
  }

  double value(const Eigen::VectorXd& x) const { return evaluate(x, nullptr); }

  /// Fidelity; fills `grad` (d fidelity / dx) when non-null.
  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    const PulseSchedule s = decode(x);
    const std::size_t ns = segments();
    const Eigen::Index d = sys_->dim();
    std::vector<Eig> eig(ns);
    std::vector<CVector> psi(ns + 1);
    psi[0] = basis_state(d, sys_->initial);
    for (std::size_t k = 0; k < ns; ++k) {
      eig[k] = Eig(CMatrix(sys_->hamiltonian(s.omega[k], s.delta[k], s.phase_of(k))));
      psi[k + 1] = eig[k].propagate(s.duration[k], psi[k]);
    }
    const cplx a = psi[ns](sys_->target);
    const double f = std::norm(a);
    if (!std::isfinite(f)) throw PropagationError("non-finite fidelity");
    if (!grad) return f;

    grad->setZero(static_cast<Eigen::Index>(size()));
    const auto& b = shape_.bounds;
    CVector chi = basis_state(d, sys_->target);
    CVector half_phase(d);
    for (std::size_t kk = ns; kk-- > 0;) {
      const Eig& e = eig[kk];
      const Eigen::VectorXd& l = e.values;
      const double tau = s.duration[kk];
      const CVector p = e.to_eigenbasis(psi[kk]);
      const CVector c = e.to_eigenbasis(chi);
      for (Eigen::Index r = 0; r < d; ++r) half_phase(r) = std::exp(cplx(0.0, -0.5 * tau * l(r)));
      CMatrix m(d, d);
      for (Eigen::Index bb = 0; bb < d; ++bb) {
        const cplx pb = p(bb) * half_phase(bb) * cplx(0.0, -tau);
        for (Eigen::Index aa = 0; aa < d; ++aa) {
          const double h = 0.5 * tau * (l(aa) - l(bb));
          const double sinc = std::abs(h) < 1e-6 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
          m(aa, bb) = std::conj(c(aa)) * half_phase(aa) * pb * sinc;
        }
      }
      const CMatrix w = e.from_eigenbasis_sandwich(m);
      // sum_ij dH_ij W_ji
      auto contract = [&](const SparseH& dh) {
        cplx acc = 0.0;
        for (Eigen::Index col = 0; col < dh.outerSize(); ++col)
          for (SparseH::InnerIterator it(dh, col); it; ++it) acc += it.value() * w(it.col(), it.row());
        return acc;
      };
      const cplx ph = std::exp(cplx(0.0, s.phase_of(kk)));
      const cplx d_omega = ph * contract(raise_) + std::conj(ph) * contract(raise_adj_);
      const cplx d_delta = contract(number_);
      const auto q = static_cast<Eigen::Index>(kk * per_segment());
      (*grad)(q) = 2.0 * std::real(std::conj(a) * d_omega) * b.omega_max;
      (*grad)(q + 1) = 2.0 * std::real(std::conj(a) * d_delta) * 2.0 * b.delta_max;
      if (free_) {
        // d/dtau: chi^dagger (-i H) psi_k, in the eigenbasis of segment kk.
        const CVector pk = e.to_eigenbasis(psi[kk + 1]);
        cplx acc = 0.0;
        for (Eigen::Index r = 0; r < d; ++r) acc += std::conj(c(r)) * l(r) * pk(r);
        (*grad)(q + 2) = 2.0 * std::real(std::conj(a) * cplx(0.0, -1.0) * acc) * b.time_budget;
      }
      // chi_{k-1} = U_k^dagger chi_k
      chi = e.propagate(-tau, chi);
    }
    return f;
  }

  /// Central finite-difference gradient (for validation).
  Eigen::VectorXd finite_difference_gradient(const Eigen::VectorXd& x, double h = 1e-6) const {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index q = 0; q < x.size(); ++q) {
      Eigen::VectorXd xp = x, xm = x;
      xp(q) += h;
      xm(q) -= h;
      g(q) = (evaluate(xp, nullptr) - evaluate(xm, nullptr)) / (2 * h);
    }
    return g;
  }

 private:
  /// Eigen-decomposition of one segment Hamiltonian; real arithmetic when H is real.
  struct Eig {
    bool real = true;
    Eigen::MatrixXd vr;
    CMatrix vc;
    Eigen::VectorXd values;

    Eig() = default;
    explicit Eig(const CMatrix& h) : real(h.imag().cwiseAbs().maxCoeff() == 0.0) {
      if (real) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
        vr = es.eigenvectors();
        values = es.eigenvalues();
      } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        vc = es.eigenvectors();
        values = es.eigenvalues();
      }
    }
    CVector to_eigenbasis(const CVector& x) const {
      if (!real) return vc.adjoint() * x;
      CVector out(x.size());
      out.real() = vr.transpose() * x.real();
      out.imag() = vr.transpose() * x.imag();
      return out;
    }
    CVector from_eigenbasis(const CVector& c) const {
      if (!real) return vc * c;
      CVector out(c.size());
      out.real() = vr * c.real();
      out.imag() = vr * c.imag();
      return out;
    }
    CVector propagate(double tau, const CVector& x) const {
      CVector c = to_eigenbasis(x);
      for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(cplx(0.0, -tau * values(k)));
      return from_eigenbasis(c);
    }
    /// V M^T V^dagger.
    CMatrix from_eigenbasis_sandwich(const CMatrix& m) const {
      if (!real) return vc * m.transpose() * vc.adjoint();
      CMatrix out(m.rows(), m.cols());
      out.real() = vr * m.real().transpose() * vr.transpose();
      out.imag() = vr * m.imag().transpose() * vr.transpose();
      return out;
    }
  };

  /// Projection onto {t_k >= lo, sum t_k <= 1}.
  static std::vector<double> project_durations(std::vector<double> t, double lo) {
    const auto n = static_cast<double>(t.size());
    require(lo * n <= 1.0, "minimum durations exceed the time budget");
    double sum = 0;
    for (double& v : t) {
      v = std::max(v, lo);
      sum += v;
    }
    if (sum <= 1.0) return t;
    // Find mu with sum max(lo, t_k - mu) = 1 by bisection.
    double a = 0.0, b = *std::max_element(t.begin(), t.end());
    for (int it = 0; it < 200; ++it) {
      const double mu = 0.5 * (a + b);
      double s = 0;
      for (double v : t) s += std::max(lo, v - mu);
      (s > 1.0 ? a : b) = mu;
    }
    for (double& v : t) v = std::max(lo, v - b);
    return t;
  }

  std::shared_ptr<const ControlSystem> sys_;
  PulseSchedule shape_;
  bool free_;
  SparseH raise_, raise_adj_, number_;
};

namespace detail {

/// Projected ascent on log F with Armijo backtracking and Barzilai-Borwein trial steps.
/// log F has the same maximizers as F and no plateau where F is exponentially small.
inline OptimizationReport optimize_gradient(const GrapeObjective& obj, const PulseSchedule& s0,
                                            const OptimizeOptions& opt) {
  constexpr double kFloor = 1e-300;
  OptimizationReport rep;
  rep.method = to_string(OptimizerMethod::kGradient);
  Eigen::VectorXd x = obj.project(obj.encode(s0));
  Eigen::VectorXd g;
  double f = obj.evaluate(x, &g);
  ++rep.evaluations;
  auto pg_norm = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& gg) {
    return (obj.project(xx + gg) - xx).norm();
  };
  double lf = std::log(f + kFloor);
  Eigen::VectorXd lg = g / (f + kFloor);
  rep.fidelity_trace.push_back(f);
  rep.gradient_norms.push_back(pg_norm(x, g));
  double lg_norm = pg_norm(x, lg);
  double alpha = 1.0 / std::max(1.0, lg.norm());
  rep.termination = "iteration cap";
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (lg_norm < opt.gradient_tolerance) {
      rep.termination = "gradient norm";
      break;
    }
    bool accepted = false;
    Eigen::VectorXd xn, gn;
    double fn = 0, lfn = 0;
    for (int bt = 0; bt < 60; ++bt) {
      xn = obj.project(x + alpha * lg);
      const Eigen::VectorXd step = xn - x;
      if (step.norm() == 0.0) break;
      fn = obj.evaluate(xn, &gn);
      ++rep.evaluations;
      if (!std::isfinite(fn)) throw ConvergenceError("non-finite fidelity during line search");
      lfn = std::log(fn + kFloor);
      if (lfn >= lf + 1e-4 * lg.dot(step)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      rep.termination = "line search failed";
      break;
    }
    const Eigen::VectorXd lgn = gn / (fn + kFloor);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = lg - lgn;  // gradient change of the minimized objective -log F
    const double gain = lfn - lf;
    x = xn;
    f = fn;
    lf = lfn;
    g = gn;
    lg = lgn;
    lg_norm = pg_norm(x, lg);
    ++rep.iterations;
    rep.fidelity_trace.push_back(f);
    rep.gradient_norms.push_back(pg_norm(x, g));
    const double sy = s.dot(y);
    alpha = sy > 0 ? std::clamp(s.squaredNorm() / sy, 1e-10, 1e4) : std::min(1e4, 2.0 * alpha);
    // log(F'/F) >= F' - F for F' <= 1, so this also bounds the fidelity gain.
    if (gain < opt.gain_tolerance) {
      rep.termination = "fidelity gain";
      break;
    }
  }
  rep.schedule = obj.decode(x);
  rep.fidelity = f;
  return rep;
}

struct SimplexData {
  const GrapeObjective* obj;
  int evaluations = 0;
};

inline Eigen::VectorXd from_unbounded(const gsl_vector* u) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(u->size));
  for (std::size_t k = 0; k < u->size; ++k) {
    const double s = std::sin(gsl_vector_get(u, k));
    x(static_cast<Eigen::Index>(k)) = s * s;
  }
  return x;
}

inline double simplex_cost(const gsl_vector* u, void* params) {
  auto* d = static_cast<SimplexData*>(params);
  ++d->evaluations;
  return 1.0 - d->obj->evaluate(from_unbounded(u), nullptr);
}

inline OptimizationReport optimize_simplex(const GrapeObjective& obj, const PulseSchedule& s0,
                                           const OptimizeOptions& opt) {
  require(!obj.free_durations(), "the derivative-free method uses fixed segment durations");
  OptimizationReport rep;
  rep.method = to_string(OptimizerMethod::kDerivativeFree);
  const Eigen::VectorXd x0 = obj.project(obj.encode(s0));
  const std::size_t n = obj.size();
  gsl_vector* u = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t k = 0; k < n; ++k) {
    gsl_vector_set(u, k, std::asin(std::sqrt(std::clamp(x0(static_cast<Eigen::Index>(k)), 0.0, 1.0))));
    gsl_vector_set(step, k, opt.simplex_step);
  }
  SimplexData data{&obj};
  gsl_multimin_function fn{&simplex_cost, n, &data};
  gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(m, &fn, u, step);
  rep.fidelity_trace.push_back(1.0 - m->fval);
  rep.termination = "iteration cap";
  for (int it = 0; it < opt.max_iterations; ++it) {
    const int status = gsl_multimin_fminimizer_iterate(m);
    ++rep.iterations;
    if (status != GSL_SUCCESS) {
      rep.termination = "simplex stalled";
      break;
    }
    if (1.0 - m->fval > rep.fidelity_trace.back()) rep.fidelity_trace.push_back(1.0 - m->fval);
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), opt.simplex_tolerance) == GSL_SUCCESS) {
      rep.termination = "simplex size";
      break;
    }
  }
  const Eigen::VectorXd x = from_unbounded(gsl_multimin_fminimizer_x(m));
  rep.fidelity = 1.0 - m->fval;
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(u);
  gsl_vector_free(step);
  rep.schedule = obj.decode(x);
  rep.evaluations = data.evaluations;
  if (!std::isfinite(rep.fidelity)) throw ConvergenceError("non-finite fidelity in simplex search");
  return rep;
}

}  // namespace detail

/// Optimizes the controls of `s0` (durations too with free_durations).
inline OptimizationReport optimize(const PulseSchedule& s0, std::shared_ptr<const ControlSystem> sys,
                                   const OptimizeOptions& opt = {}) {
  s0.validate();
  require(opt.max_iterations >= 0, "iteration cap must be non-negative");
  const GrapeObjective obj(std::move(sys), s0, opt.free_durations);
  gsl_set_error_handler_off();
  return opt.method == OptimizerMethod::kGradient ? detail::optimize_gradient(obj, s0, opt)
                                                  : detail::optimize_simplex(obj, s0, opt);
}

struct MultiStartReport {
  std::vector<OptimizationReport> runs;
  std::size_t best = 0;
  double best_fidelity = 0.0;
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;
  double min_fidelity = 0.0;
};

/// Seeded random starts (seed, seed + 1, ...) optimized independently.
inline MultiStartReport optimize_multistart(std::shared_ptr<const ControlSystem> sys, std::size_t segments,
                                            const ScheduleBounds& bounds, const OptimizeOptions& opt,
                                            std::size_t starts = 16, std::uint64_t seed = 1,
                                            unsigned workers = 1) {
  require(starts >= 1, "at least one start is required");
  MultiStartReport out;
  out.runs = parallel_map(starts, workers, [&](std::size_t k) {
    return optimize(PulseSchedule::random(segments, bounds, seed + k), sys, opt);
  });
  double sum = 0, sum2 = 0;
  out.min_fidelity = 1.0;
  for (std::size_t k = 0; k < out.runs.size(); ++k) {
    const double f = out.runs[k].fidelity;
    sum += f;
    sum2 += f * f;
    out.min_fidelity = std::min(out.min_fidelity, f);
    if (f > out.best_fidelity) {
      out.best_fidelity = f;
      out.best = k;
    }
  }
  const auto n = static_cast<double>(out.runs.size());
  out.mean_fidelity = sum / n;
  out.std_fidelity = std::sqrt(std::max(0.0, sum2 / n - out.mean_fidelity * out.mean_fidelity));
  return out;
}

}  // namespace rydcirc
