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

#include "rydcirc/manifold/defects.hpp"
#include "rydcirc/manifold/hydrogen.hpp"
#include "rydcirc/manifold/named_levels.hpp"
#include "rydcirc/manifold/radial.hpp"
#include "rydcirc/manifold/rb_stark.hpp"
#include "rydcirc/manifold/states.hpp"
#include "rydcirc/manifold/wigner.hpp"

namespace rydcirc {
namespace {

double ea0_over_h() { return constants().e * constants().a0 / constants().h; }

TEST(States, BasisSizesAreNSquared) {
  for (int n : {2, 5, 12}) {
    EXPECT_EQ(parabolic_basis(n).size(), static_cast<std::size_t>(n * n));
    EXPECT_EQ(spherical_basis(n).size(), static_cast<std::size_t>(n * n));
    EXPECT_EQ(ladder_basis(n).size(), static_cast<std::size_t>(n));
    EXPECT_EQ(manifold_basis(n, Representation::kSpherical).size(), static_cast<std::size_t>(n * n));
    EXPECT_EQ(parabolic_basis(n, MSector::kNonNegative).size(), static_cast<std::size_t>(n * (n + 1) / 2));
  }
}

TEST(States, ParabolicLabelsAreUniqueAndValid) {
  const auto b = parabolic_basis(9);
  std::set<ParabolicState> seen(b.begin(), b.end());
  EXPECT_EQ(seen.size(), b.size());
  for (const auto& s : b) {
    EXPECT_TRUE(s.valid());
    EXPECT_EQ(s.n1 + s.n2 + std::abs(s.m) + 1, 9);
  }
}

TEST(States, PseudospinRoundTrip) {
  for (int n : {3, 8, 51}) {
    const int tj = n - 1;
    for (const auto& s : parabolic_basis(n)) {
      const auto p = to_pseudospins(s);
      EXPECT_LE(std::abs(p.m1.twice), tj);
      EXPECT_LE(std::abs(p.m2.twice), tj);
      EXPECT_EQ((p.m1 + p.m2).twice, 2 * s.m);
      EXPECT_EQ(from_pseudospins(n, p), s);
    }
  }
}

TEST(States, LadderStatesAreTheN1ZeroRungs) {
  const int n = 7;
  for (const auto& l : ladder_basis(n)) {
    const auto p = l.to_parabolic();
    EXPECT_EQ(p.n1, 0);
    EXPECT_EQ(SpinLadderState::from_parabolic(p), l);
    // n1 = 0 means n2 = n - 1 - m, i.e. m2 = J: only pseudospin 1 moves along the ladder.
    EXPECT_EQ(to_pseudospins(p).m2.twice, n - 1);
  }
  EXPECT_EQ(SpinLadderState::spin_of_manifold(51).twice, 50);
}

TEST(States, InvalidLabelsThrow) {
  EXPECT_THROW(ParabolicState::make(5, 3, 2), InvalidArgument);
  EXPECT_THROW(ParabolicState::make(5, -1, 0), InvalidArgument);
  EXPECT_THROW(SphericalState::make(4, 4, 0), InvalidArgument);
  EXPECT_THROW(SpinLadderState::from_parabolic(ParabolicState::make(5, 1, 0)), InvalidArgument);
}

TEST(NamedLevels, ResolveAndParse) {
  const int n = 51;
  EXPECT_EQ(resolve(NamedLevel::kI, n), ParabolicState::make(51, 1, 2));
  EXPECT_EQ(resolve(NamedLevel::kIPrime, n), ParabolicState::make(51, 3, 1));
  EXPECT_EQ(resolve(NamedLevel::kC, n), ParabolicState::make(51, 0, 50));
  std::set<ParabolicState> all;
  for (auto p : kNamedLevels) {
    EXPECT_TRUE(resolve(p, n).valid());
    EXPECT_EQ(named_level_from(name_of(p)), p);
    all.insert(resolve(p, n));
  }
  EXPECT_EQ(all.size(), kNamedLevels.size());
  EXPECT_THROW(named_level_from("z"), InvalidArgument);
}

// Closed-form values of small Clebsch-Gordan coefficients.
TEST(Wigner, KnownCoefficients) {
  EXPECT_NEAR(clebsch_gordan_twice(2, 0, 2, 0, 4, 0), std::sqrt(2.0 / 3.0), 1e-14);
  EXPECT_NEAR(clebsch_gordan_twice(2, 0, 2, 0, 0, 0), -std::sqrt(1.0 / 3.0), 1e-14);
  EXPECT_NEAR(clebsch_gordan_twice(1, 1, 1, -1, 2, 0), std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(clebsch_gordan_twice(1, 1, 1, -1, 0, 0), std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(clebsch_gordan_twice(2, 2, 2, 0, 2, 2), std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(wigner_3j(1, 1, 0, 0, 0, 0), -1.0 / std::sqrt(3.0), 1e-14);
  EXPECT_EQ(wigner_3j(1, 1, 3, 0, 0, 0), 0.0);
  EXPECT_EQ(wigner_3j(1, 1, 1, 0, 0, 0), 0.0);
}

TEST(Wigner, ClebschGordanOrthogonality) {
  for (int tj1 : {1, 2, 5}) {
    for (int tj2 : {1, 2, 4}) {
      for (int tJ = std::abs(tj1 - tj2); tJ <= tj1 + tj2; tJ += 2) {
        for (int tJp = std::abs(tj1 - tj2); tJp <= tj1 + tj2; tJp += 2) {
          for (int tM = -std::min(tJ, tJp); tM <= std::min(tJ, tJp); tM += 2) {
            double s = 0;
            for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2)
              s += clebsch_gordan_twice(tj1, tm1, tj2, tM - tm1, tJ, tM) *
                   clebsch_gordan_twice(tj1, tm1, tj2, tM - tm1, tJp, tM);
            EXPECT_NEAR(s, tJ == tJp ? 1.0 : 0.0, 1e-12);
          }
        }
      }
    }
  }
}

// <l+1, m| cos(theta) |l, m> = sqrt(((l+1)^2 - m^2) / ((2l+1)(2l+3))).
TEST(Wigner, Rank1ZMatrixElement) {
  for (int l = 0; l < 12; ++l)
    for (int m = -l; m <= l; ++m) {
      const double expect = std::sqrt(((l + 1.0) * (l + 1.0) - m * m) / ((2.0 * l + 1) * (2.0 * l + 3)));
      EXPECT_NEAR(rank1_angular(l + 1, m, l, m, 0), expect, 1e-12);
      EXPECT_NEAR(rank1_angular(l, m, l + 1, m, 0), expect, 1e-12);
    }
  EXPECT_EQ(rank1_angular(3, 1, 2, 1, 1), 0.0);
}

// Sum over q and m' of |<l', m'| C^1_q |l, m>|^2 over l' = l +- 1 is 1.
TEST(Wigner, Rank1Completeness) {
  for (int l = 0; l < 8; ++l)
    for (int m = -l; m <= l; ++m) {
      double s = 0;
      for (int lp : {l - 1, l + 1}) {
        if (lp < 0) continue;
        for (int q = -1; q <= 1; ++q) s += std::pow(rank1_angular(lp, m + q, l, m, q), 2);
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Hydrogen, StarkFrequencyValues) {
  EXPECT_NEAR(stark_frequency(51, 2.35 * 100) / (kTwoPi * 1e6), 230.0, 0.5);
  EXPECT_NEAR(stark_frequency(50, 100.0) / (kTwoPi * 1e6), 95.97, 0.01);
  EXPECT_EQ(stark_frequency(51, 0.0), 0.0);
  EXPECT_THROW(stark_frequency(51, -1.0), InvalidArgument);
  // 3/2 n e a0 F / h from the constants directly.
  EXPECT_NEAR(stark_frequency(40, 123.0), kTwoPi * 1.5 * 40 * 123.0 * ea0_over_h(), 1e-6);
}

TEST(Hydrogen, FirstOrderEnergies) {
  const int n = 51;
  const double f = 235.0;
  const double hw = constants().hbar * stark_frequency(n, f);
  for (const auto& s : parabolic_basis(n)) EXPECT_EQ(first_order_energy(s, 0.0), 0.0);
  // Within fixed m, n1 -> n1 + 1 raises k by 2.
  const double d0 = first_order_energy(ParabolicState::make(n, 1, 0), f) - first_order_energy(ParabolicState::make(n, 0, 0), f);
  EXPECT_NEAR(d0 / hw, 2.0, 1e-12);
  // Along the n1 = 0 ladder each m step raises the energy by hbar w_n.
  for (int m = 0; m + 1 < n; ++m) {
    const double d = first_order_energy(ParabolicState::make(n, 0, m + 1), f) -
                     first_order_energy(ParabolicState::make(n, 0, m), f);
    EXPECT_NEAR(d / hw, 1.0, 1e-12);
  }
  // Symmetric spectrum: k -> -k.
  for (const auto& s : parabolic_basis(9)) {
    const auto mirror = ParabolicState::make(9, s.n2, s.m);
    EXPECT_NEAR(first_order_energy(s, f), -first_order_energy(mirror, f), 1e-30);
  }
}

TEST(Hydrogen, LadderCouplingAndRabiRelation) {
  const int n = 11;
  const auto J = SpinLadderState::spin_of_manifold(n);
  for (int t = -J.twice; t < J.twice; t += 2) {
    const double j = J.value();
    const double m = 0.5 * t;
    EXPECT_NEAR(ladder_coupling(n, HalfInt::from_twice(t)), std::sqrt((j - m) * (j + m + 1)), 1e-12);
  }
  EXPECT_THROW(ladder_coupling(n, J), InvalidArgument);
  const double om = kTwoPi * 3.52e6;
  EXPECT_NEAR(ladder_rabi_frequency(51, ladder_field_for_rabi(51, om)), om, 1e-6);
  // Omega = (3/2) n e a0 E / hbar: at 3.52 MHz and n = 51, E+ is about 3.6 cV/cm.
  EXPECT_NEAR(ladder_field_for_rabi(51, om), 3.52e6 / (1.5 * 51 * ea0_over_h()), 1e-12);
}

// Hydrogen radial integral <n, l-1| r |n, l> = (3/2) n sqrt(n^2 - l^2).
TEST(Radial, NumerovMatchesHydrogenFormula) {
  for (int n : {5, 10, 20}) {
    for (int l : {1, 3, n - 1}) {
      const auto a = numerov_wavefunction(n, l - 1);
      const auto b = numerov_wavefunction(n, l);
      const double expect = 1.5 * n * std::sqrt(double(n * n - l * l));
      EXPECT_NEAR(std::abs(radial_integral(a, b)) / expect, 1.0, 2e-4) << "n=" << n << " l=" << l;
      EXPECT_NEAR(radial_integral(a, a, 0), 1.0, 1e-9);
    }
  }
}

// <r> = (3 n^2 - l (l + 1)) / 2 for hydrogen.
TEST(Radial, ExpectationOfR) {
  for (int l : {0, 2, 9}) {
    const auto w = numerov_wavefunction(10, l);
    EXPECT_NEAR(radial_integral(w, w, 1) / (0.5 * (300.0 - l * (l + 1))), 1.0, 2e-4);
  }
}

TEST(Radial, SolverCachesAndIsSymmetric) {
  RadialSolver s;
  EXPECT_EQ(s.wavefunction(40.5, 3).get(), s.wavefunction(40.5, 3).get());
  EXPECT_NEAR(s.dipole(40.35, 2, 40.98, 3), s.dipole(40.98, 3, 40.35, 2), 1e-9);
  EXPECT_THROW(numerov_wavefunction(3.0, 5), InvalidArgument);
}

TEST(Defects, TableRoundTripAndErrors) {
  const auto rb = DefectTable::rubidium85();
  EXPECT_NEAR(rb.n_star(51, 0), 51 - 3.1311804, 1e-12);
  EXPECT_EQ(rb.at(7), 0.0);
  EXPECT_TRUE(rb.core_shifted(0));
  EXPECT_TRUE(rb.core_shifted(2));
  EXPECT_FALSE(rb.core_shifted(3));
  std::istringstream in(format_defect_table(rb));
  const auto back = parse_defect_table(in);
  ASSERT_EQ(back.delta.size(), rb.delta.size());
  for (std::size_t l = 0; l < rb.delta.size(); ++l) EXPECT_DOUBLE_EQ(back.delta[l], rb.delta[l]);
  EXPECT_EQ(back.l_hydrogenic, rb.l_hydrogenic);
  std::istringstream bad("0 3.1\n");
  EXPECT_THROW(parse_defect_table(bad), ConfigError);
  std::istringstream neg("0 = -1\n");
  EXPECT_THROW(parse_defect_table(neg), ConfigError);
  std::istringstream junk("x = 1\n");
  EXPECT_THROW(parse_defect_table(junk), ConfigError);
  EXPECT_THROW(load_defect_table("/nonexistent/defects.txt"), ConfigError);
}

// Zero defects turn the quantum-defect Stark model into hydrogen: at low field
// the centre manifold must follow the first-order parabolic shifts.
TEST(RbStark, ZeroDefectsReproduceLinearStark) {
  const int n = 12;
  const RbStarkModel model(n, DefectTable::hydrogen(), 3);
  const double f = 10.0;
  const double centre = -rubidium85_rydberg_hz() / (n * n);
  for (int m : {0, 2, 5}) {
    const auto blk = model.diagonalize(m, f);
    EXPECT_EQ(blk.centre_count(), n - m);
    for (int n1 = 0; n1 < n - m; ++n1) {
      const auto s = ParabolicState::make(n, n1, m);
      const double expect = first_order_energy(s, f) / constants().h;
      EXPECT_NEAR(blk.energies(blk.column_of(n1)) - centre, expect, 2e3) << to_string(s);
    }
  }
}

TEST(RbStark, CentreManifoldCountIsPreserved) {
  const RbStarkModel model(51);
  for (int m : {0, 1, 2, 3, 10, 50}) {
    const auto blk = model.diagonalize(m, 176.0);
    EXPECT_EQ(blk.centre_count(), 51 - m) << "m=" << m;
    std::set<int> labels;
    for (int v : blk.n1)
      if (v >= 0) labels.insert(v);
    EXPECT_EQ(static_cast<int>(labels.size()), 51 - m);
    EXPECT_EQ(*labels.rbegin(), 50 - m);
  }
  EXPECT_EQ(model.core_count(0), 3);
  EXPECT_EQ(model.core_count(2), 1);
  EXPECT_EQ(model.core_count(3), 0);
}

TEST(RbStark, EigenvectorsAreOrthonormal) {
  const RbStarkModel model(20);
  const auto blk = model.diagonalize(1, 500.0);
  const Eigen::MatrixXd g = blk.vectors.transpose() * blk.vectors;
  EXPECT_LT((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index k = 1; k < blk.energies.size(); ++k) EXPECT_LE(blk.energies(k - 1), blk.energies(k));
}

// The circular state has no core-shifted admixture and no linear Stark shift;
// the hydrogenic ladder |n,0,m> steps by about hbar w_n at high m.
TEST(RbStark, HighMLevelsAreHydrogenic) {
  const int n = 51;
  const RbStarkModel model(n);
  const double f = 235.0;
  const auto c = model.level(resolve(NamedLevel::kC, n), f);
  EXPECT_NEAR(c.hydrogenic_weight, 1.0, 1e-12);
  const double step = model.transition_hz(resolve(NamedLevel::kD, n), resolve(NamedLevel::kC, n), f);
  EXPECT_NEAR(step / (stark_frequency(n, f) / kTwoPi), 1.0, 0.01);
}

TEST(RbStark, DipoleMomentIsSymmetricAndLarge) {
  const RbStarkModel model(52);
  const auto i = resolve(NamedLevel::kI, 52);
  const auto ip = resolve(NamedLevel::kIPrime, 52);
  const double d1 = model.dipole_moment(i, ip, 176.0);
  const double d2 = model.dipole_moment(ip, i, 176.0);
  EXPECT_NEAR(d1, d2, 1e-9 * d1);
  // Of order n^2 e a0.
  const double ea0 = constants().e * constants().a0;
  EXPECT_GT(d1 / ea0, 100.0);
  EXPECT_LT(d1 / ea0, 52.0 * 52.0 * 1.5);
  EXPECT_THROW(model.dipole_moment(i, i, 176.0), InvalidArgument);
}

TEST(RbStark, IPrimeResonanceNear230MHz) {
  const RbStarkModel model(52);
  const double hz = std::abs(model.transition_hz(resolve(NamedLevel::kI, 52), resolve(NamedLevel::kIPrime, 52), 176.0));
  EXPECT_NEAR(hz / 230e6, 1.0, 0.05);
}

TEST(RbStark, InvalidInputs) {
  EXPECT_THROW(RbStarkModel(51, DefectTable::rubidium85(), 2), InvalidArgument);
  const RbStarkModel model(15);
  EXPECT_THROW(model.level(ParabolicState::make(14, 0, 2), 1.0), InvalidArgument);
  EXPECT_THROW(model.level(ParabolicState::make(15, 0, -2), 1.0), InvalidArgument);
}

}  // namespace
}  // namespace rydcirc
