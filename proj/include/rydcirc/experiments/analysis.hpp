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

// Peak statistics of sampled oscillation curves.

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "rydcirc/error.hpp"

namespace rydcirc {

struct PeakOptions {
  double min_prominence = 0.05;
  /// Maxima closer than this fraction of the median spacing of the first
  /// `early` peaks are merged (the higher one is kept).
  double merge_fraction = 0.5;
  std::size_t early = 5;
};

/// Topographic prominence of the local maximum at index k.
inline double prominence(const std::vector<double>& y, std::size_t k) {
  double left = y[k];
  for (std::size_t q = k; q-- > 0;) {
    if (y[q] > y[k]) break;
    left = std::min(left, y[q]);
  }
  double right = y[k];
  for (std::size_t q = k + 1; q < y.size(); ++q) {
    if (y[q] > y[k]) break;
    right = std::min(right, y[q]);
  }
  return y[k] - std::max(left, right);
}

/// Indices of prominent maxima, with close pairs merged.
inline std::vector<std::size_t> find_maxima(const std::vector<double>& t, const std::vector<double>& y,
                                            const PeakOptions& opt = {}) {
  require(t.size() == y.size(), "time and value sizes differ");
  std::vector<std::size_t> peaks;
  for (std::size_t k = 1; k + 1 < y.size(); ++k)
    if (y[k] > y[k - 1] && y[k] >= y[k + 1] && prominence(y, k) >= opt.min_prominence) peaks.push_back(k);
  if (peaks.size() < 3) return peaks;
  std::vector<double> gaps;
  for (std::size_t q = 1; q < std::min(peaks.size(), opt.early + 1); ++q) gaps.push_back(t[peaks[q]] - t[peaks[q - 1]]);
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2), gaps.end());
  const double limit = opt.merge_fraction * gaps[gaps.size() / 2];
  std::vector<std::size_t> merged{peaks.front()};
  for (std::size_t q = 1; q < peaks.size(); ++q) {
    if (t[peaks[q]] - t[merged.back()] < limit) {
      if (y[peaks[q]] > y[merged.back()]) merged.back() = peaks[q];
    } else {
      merged.push_back(peaks[q]);
    }
  }
  return merged;
}

/// Mean spacing of consecutive maxima (0 with fewer than two).
inline double mean_spacing(const std::vector<double>& t, const std::vector<std::size_t>& peaks) {
  if (peaks.size() < 2) return 0.0;
  return (t[peaks.back()] - t[peaks.front()]) / static_cast<double>(peaks.size() - 1);
}

}  // namespace rydcirc
