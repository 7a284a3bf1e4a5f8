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

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace rydcirc {

namespace detail {
inline double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }
}  // namespace detail

/// Wigner 3j symbol; all arguments are twice the angular momentum values.
inline double wigner_3j_twice(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
  if (tm1 + tm2 + tm3 != 0) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) return 0.0;
  if ((tj1 + tm1) % 2 || (tj2 + tm2) % 2 || (tj3 + tm3) % 2) return 0.0;
  if (tj3 > tj1 + tj2 || tj3 < std::abs(tj1 - tj2) || (tj1 + tj2 + tj3) % 2) return 0.0;

  // Integer quantities a = (2x)/2.
  const int j1pj2mj3 = (tj1 + tj2 - tj3) / 2;
  const int j1mj2pj3 = (tj1 - tj2 + tj3) / 2;
  const int mj1pj2pj3 = (-tj1 + tj2 + tj3) / 2;
  const int jsum1 = (tj1 + tj2 + tj3) / 2 + 1;
  const double log_delta = detail::log_factorial(j1pj2mj3) + detail::log_factorial(j1mj2pj3) +
                           detail::log_factorial(mj1pj2pj3) - detail::log_factorial(jsum1);
  const double log_pref =
      0.5 * (log_delta + detail::log_factorial((tj1 + tm1) / 2) +
             detail::log_factorial((tj1 - tm1) / 2) + detail::log_factorial((tj2 + tm2) / 2) +
             detail::log_factorial((tj2 - tm2) / 2) + detail::log_factorial((tj3 + tm3) / 2) +
             detail::log_factorial((tj3 - tm3) / 2));

  const int a1 = (tj3 - tj2 + tm1) / 2;
  const int a2 = (tj3 - tj1 - tm2) / 2;
  const int b1 = j1pj2mj3;
  const int b2 = (tj1 - tm1) / 2;
  const int b3 = (tj2 + tm2) / 2;
  const int k_lo = std::max({0, -a1, -a2});
  const int k_hi = std::min({b1, b2, b3});
  double sum = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double log_term = detail::log_factorial(k) + detail::log_factorial(a1 + k) +
                            detail::log_factorial(a2 + k) + detail::log_factorial(b1 - k) +
                            detail::log_factorial(b2 - k) + detail::log_factorial(b3 - k);
    const double term = std::exp(log_pref - log_term);
    sum += (k % 2 ? -term : term);
  }
  const int phase_exp = (tj1 - tj2 - tm3) / 2;
  return (std::abs(phase_exp) % 2 ? -sum : sum);
}

/// Wigner 3j symbol for integer arguments.
inline double wigner_3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  return wigner_3j_twice(2 * j1, 2 * j2, 2 * j3, 2 * m1, 2 * m2, 2 * m3);
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>, arguments doubled.
inline double clebsch_gordan_twice(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  const double w = wigner_3j_twice(tj1, tj2, tJ, tm1, tm2, -tM);
  const int phase_exp = (tj1 - tj2 + tM) / 2;
  return (std::abs(phase_exp) % 2 ? -1.0 : 1.0) * std::sqrt(tJ + 1.0) * w;
}

/// <l', m'| C^1_q |l, m> for the rank-1 normalized spherical harmonic C^1_q.
inline double rank1_angular(int lp, int mp, int l, int m, int q) {
  if (mp != m + q) return 0.0;
  const double phase = (std::abs(mp) % 2) ? -1.0 : 1.0;
  return phase * std::sqrt((2.0 * lp + 1.0) * (2.0 * l + 1.0)) * wigner_3j(lp, 1, l, -mp, q, m) *
         wigner_3j(lp, 1, l, 0, 0, 0);
}

}  // namespace rydcirc
