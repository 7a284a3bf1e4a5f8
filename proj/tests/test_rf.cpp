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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "rydcirc/rf/polarization.hpp"

namespace rydcirc {
namespace {

constexpr double kDipole = 433.0 * 1.602176634e-19 * 5.29177210903e-11;

// Brute-force minimum of the purity over the two intra-pair phases, the
// inter-pair phase and the pair 2-4 scale, with sigma+ amplitudes matched within pairs.
double grid_search_purity(const TransferMatrix& tm) {
  const auto t = tm.effective();
  const double a3 = std::abs(t(0, 0)) / std::abs(t(0, 2));
  const double a4 = std::abs(t(0, 1)) / std::abs(t(0, 3));
  auto eval = [&](const std::array<double, 4>& x) {
    const double s = std::exp(x[3]);
    Eigen::Vector4cd v;
    v << 1.0, std::polar(s, x[2]), std::polar(a3, x[0]), std::polar(s * a4, x[1] + x[2]);
    const Eigen::Vector2cd e = t * v;
    return purity(std::abs(e(0)), std::abs(e(1)));
  };
  const int g = 20;
  std::array<double, 4> best_x{};
  double best = 1.0;
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b)
      for (int c = 0; c < g; ++c)
        for (int q = 0; q < g; ++q) {
          const std::array<double, 4> x{a * kTwoPi / g, b * kTwoPi / g, c * kTwoPi / g, -0.5 + q / (g - 1.0)};
          const double v = eval(x);
          if (v < best) best = v, best_x = x;
        }
  std::array<double, 4> h{kTwoPi / g, kTwoPi / g, kTwoPi / g, 1.0 / (g - 1.0)};
  for (int round = 0; round < 60; ++round) {
    const auto c = best_x;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j)
        for (int k = -2; k <= 2; ++k)
          for (int l = -2; l <= 2; ++l) {
            const std::array<double, 4> x{c[0] + i * h[0], c[1] + j * h[1], c[2] + k * h[2], c[3] + l * h[3]};
            const double v = eval(x);
            if (v < best) best = v, best_x = x;
          }
    for (double& v : h) v *= 0.6;
  }
  return best;
}

TEST(Electrodes, WrapPhase) {
  EXPECT_DOUBLE_EQ(wrap_phase(-0.5), kTwoPi - 0.5);
  EXPECT_DOUBLE_EQ(wrap_phase(kTwoPi), 0.0);
  EXPECT_NEAR(wrap_phase(7 * kPi), kPi, 1e-12);
}

TEST(Electrodes, SingleElectrodeIsLinear) {
  const auto tm = TransferMatrix::ideal();
  for (std::size_t k = 0; k < 4; ++k)
    EXPECT_NEAR(purity(field_at_center(ElectrodeDrive::uniform().only(k), tm)), 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(Electrodes, QuadratureDriveIsCircular) {
  const auto tm = TransferMatrix::ideal(2.0);
  ElectrodeDrive d = ElectrodeDrive::uniform();
  for (std::size_t k = 0; k < 4; ++k) d.set_phase(k, k * kPi / 2.0);
  const auto f = field_at_center(d, tm);
  EXPECT_NEAR(std::abs(f.e_plus), 4.0, 1e-12);
  EXPECT_LT(std::abs(f.e_minus), 1e-12);
}

TEST(Electrodes, RabiFieldRoundTrip) {
  const double e = 0.7;
  const double w = rabi_from_field(e, kDipole);
  EXPECT_NEAR(w, kTwoPi * std::sqrt(2.0) * kDipole * e / 6.62607015e-34, 1e-6 * w);
  EXPECT_NEAR(field_from_rabi(w, kDipole), e, 1e-14);
}

TEST(Purity, MeasuredRabiPair) {
  // Omega- = 107 kHz against Omega+ = 30 MHz.
  EXPECT_NEAR(100.0 * purity(30e6, 107e3), 0.36, 0.005);
  EXPECT_THROW(purity(0.0, 0.0), InvalidArgument);
}

TEST(TextIo, TransferMatrixRoundTrip) {
  auto tm = perturb_transfer_matrix(TransferMatrix::ideal(1.3), 0.1, 0.2, 5);
  tm.crosstalk(0, 1) = cplx(0.02, -0.01);
  std::stringstream s;
  write_transfer_matrix(s, tm);
  const auto back = read_transfer_matrix(s);
  EXPECT_LT((back.t - tm.t).norm(), 1e-14);
  EXPECT_LT((back.crosstalk - tm.crosstalk).norm(), 1e-14);
  std::istringstream bad("E+ 1 0 1 0\n");
  EXPECT_THROW(read_transfer_matrix(bad), ConfigError);
}

TEST(TextIo, DrivesRoundTrip) {
  ElectrodeDrive d;
  d.amplitude = {1.0, 0.5, 0.25, 2.0};
  d.phase = {0.0, 1.0, 2.0, 3.0};
  std::stringstream s;
  write_drives(s, d);
  const auto back = read_drives(s);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(back.amplitude[k], d.amplitude[k], 1e-14);
    EXPECT_NEAR(back.phase[k], d.phase[k], 1e-14);
  }
}

TEST(Golden, MinimizesQuadratic) {
  const double x = golden_section_minimize([](double v) { return (v - 0.3) * (v - 0.3); }, -1.0, 2.0, 1e-10, 200, 0);
  EXPECT_NEAR(x, 0.3, 1e-9);
  EXPECT_THROW(golden_section_minimize([](double v) { return v * v; }, -1.0, 1.0, 1e-12, 5, 7), ConvergenceError);
  try {
    golden_section_minimize([](double) { return std::nan(""); }, 0.0, 1.0, 1e-6, 100, 3);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.step(), 3);
  }
}

TEST(Polarization, IdealElectrodesReachPureCircular) {
  const auto tm = TransferMatrix::ideal();
  SimulatedOracle oracle(tm, kDipole);
  const auto res = optimize_polarization(oracle, ElectrodeDrive::uniform());
  EXPECT_LT(purity(field_at_center(res.drives, tm)), 1e-10);
  std::set<int> steps;
  for (const auto& r : res.audit) steps.insert(r.step);
  EXPECT_EQ(steps, (std::set<int>{1, 2, 3, 4, 5}));
  EXPECT_EQ(res.checkpoints.size(), 3u);
  std::ostringstream log;
  write_audit_log(log, res.audit);
  const std::string text = log.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(res.audit.size()) + 1);
}

// The procedure against an independent brute-force phase search on imbalanced hardware.
TEST(Polarization, ImbalancedElectrodesMatchGridSearch) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto tm = perturb_transfer_matrix(TransferMatrix::ideal(), 0.1, 0.1, seed);
    SimulatedOracle oracle(tm, kDipole);
    PolarizationOptions opt;
    opt.passes = 2;
    const auto res = optimize_polarization(oracle, ElectrodeDrive::uniform(), opt);
    const double p = purity(field_at_center(res.drives, tm));
    EXPECT_LT(p, 1e-3) << "seed " << seed;
    EXPECT_LE(p, 1.5 * grid_search_purity(tm) + 1e-9) << "seed " << seed;
    const double initial = purity(field_at_center(ElectrodeDrive::uniform(), tm));
    EXPECT_LT(p, initial);
  }
}

TEST(Polarization, PhaseErrorsAreRemoved) {
  // Pure phase imbalance is removable exactly.
  const auto tm = perturb_transfer_matrix(TransferMatrix::ideal(), 0.0, 0.3, 9);
  SimulatedOracle oracle(tm, kDipole);
  const auto res = optimize_polarization(oracle, ElectrodeDrive::uniform());
  EXPECT_LT(purity(field_at_center(res.drives, tm)), 1e-9);
}

TEST(Polarization, NoiseDegradesPurityMonotonically) {
  const auto tm = TransferMatrix::ideal();
  double last = -1.0;
  for (double noise : {0.0, 0.01, 0.05}) {
    const auto runs = polarization_monte_carlo(tm, kDipole, noise, 24, 11, ElectrodeDrive::uniform());
    double mean = 0;
    for (double v : runs) mean += v / runs.size();
    EXPECT_GT(mean, last);
    last = mean;
  }
  EXPECT_LT(last, 0.1);
}

TEST(Polarization, MonteCarloIsDeterministic) {
  const auto tm = TransferMatrix::ideal();
  const auto a = polarization_monte_carlo(tm, kDipole, 0.02, 6, 3, ElectrodeDrive::uniform(), {}, 1);
  const auto b = polarization_monte_carlo(tm, kDipole, 0.02, 6, 3, ElectrodeDrive::uniform(), {}, 3);
  EXPECT_EQ(a, b);
}

TEST(Polarization, DeadElectrodeRaisesWithStep) {
  auto tm = TransferMatrix::ideal();
  tm.t.col(2).setZero();
  SimulatedOracle oracle(tm, kDipole);
  try {
    optimize_polarization(oracle, ElectrodeDrive::uniform());
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.step(), 1);
  }
}

}  // namespace
}  // namespace rydcirc
