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

// Nonlinear least squares with Eigen's Levenberg-Marquardt and
// central-difference Jacobians.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>
#include <vector>

#include "rydcirc/error.hpp"

namespace rydcirc {

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::VectorXd sigmas;      ///< 1 sigma, from s^2 (J^T J)^-1
  double residual_norm = 0.0;  ///< sqrt of the (weighted) residual sum of squares
  int evaluations = 0;
  bool ok = true;              ///< false for degenerate or failed fits
  std::string message;

  double operator[](const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return params(static_cast<Eigen::Index>(k));
    throw InvalidArgument("no fit parameter named '" + name + "'");
  }
  double sigma(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return sigmas(static_cast<Eigen::Index>(k));
    throw InvalidArgument("no fit parameter named '" + name + "'");
  }
};

/// Residual vector r(p); the fit minimizes |r|^2.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct FitOptions {
  double xtol = 1e-12;
  double ftol = 1e-14;
  int max_evaluations = 4000;
};

namespace detail {

struct ResidualFunctor : Eigen::DenseFunctor<double> {
  ResidualFunctor(const ResidualFn& fn, int inputs, int values)
      : Eigen::DenseFunctor<double>(inputs, values), fn_(&fn) {}
  int operator()(const InputType& x, ValueType& f) const {
    f = (*fn_)(x);
    if (f.size() != values()) throw InvalidArgument("residual size changed during the fit");
    return 0;
  }
  const ResidualFn* fn_;
};

}  // namespace detail

/// Minimizes |r(p)|^2 from p0. Parameters should be scaled to order unity.
inline FitResult least_squares(const ResidualFn& residual, const Eigen::VectorXd& p0,
                               std::vector<std::string> names = {}, const FitOptions& opt = {}) {
  const Eigen::VectorXd r0 = residual(p0);
  const auto m = static_cast<int>(r0.size());
  const auto n = static_cast<int>(p0.size());
  require(n >= 1, "a fit needs at least one parameter");
  require(m >= n, "a fit needs at least as many residuals as parameters");
  require(r0.allFinite(), "residuals at the starting point are not finite");
  if (names.empty())
    for (int k = 0; k < n; ++k) names.push_back("p" + std::to_string(k));
  require(static_cast<int>(names.size()) == n, "parameter names do not match the parameter count");

  detail::ResidualFunctor f(residual, n, m);
  Eigen::NumericalDiff<detail::ResidualFunctor, Eigen::Central> diff(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::ResidualFunctor, Eigen::Central>> lm(diff);
  lm.setXtol(opt.xtol);
  lm.setFtol(opt.ftol);
  lm.setMaxfev(opt.max_evaluations);
  Eigen::VectorXd p = p0;
  const auto status = lm.minimize(p);

  FitResult out;
  out.names = std::move(names);
  out.params = p;
  out.evaluations = static_cast<int>(lm.nfev());
  const Eigen::VectorXd r = residual(p);
  out.residual_norm = r.norm();
  using Eigen::LevenbergMarquardtSpace::Status;
  if (status == Status::ImproperInputParameters || !p.allFinite() || !r.allFinite()) {
    out.ok = false;
    out.message = "fit failed";
  } else if (status == Status::TooManyFunctionEvaluation) {
    out.ok = false;
    out.message = "fit hit the evaluation cap";
  }

  Eigen::MatrixXd jac(m, n);
  diff.df(p, jac);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  out.sigmas = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  if (lu.rank() < n) {
    out.ok = false;
    out.message = "degenerate fit: parameters are not identifiable from the data";
  } else {
    const double s2 = m > n ? r.squaredNorm() / (m - n) : 0.0;
    const Eigen::MatrixXd cov = s2 * lu.inverse();
    for (int k = 0; k < n; ++k) out.sigmas(k) = std::sqrt(std::max(0.0, cov(k, k)));
  }
  return out;
}

}  // namespace rydcirc
