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

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rydcirc/error.hpp"

namespace rydcirc {

/// Quantum defects delta_l per orbital series; zero from l_hydrogenic upwards.
struct DefectTable {
  std::vector<double> delta;
  int l_hydrogenic = 0;

  /// Spin-orbit averaged 85Rb values for s, p, d, f; zero for l >= 4.
  static DefectTable rubidium85() { return DefectTable{{3.1311804, 2.6461, 1.3471, 0.01653}, 4}; }
  static DefectTable hydrogen() { return DefectTable{{}, 0}; }

  double at(int l) const {
    if (l < 0) throw InvalidArgument("negative orbital quantum number");
    if (l >= l_hydrogenic || static_cast<std::size_t>(l) >= delta.size()) return 0.0;
    return delta[static_cast<std::size_t>(l)];
  }

  double n_star(int n, int l) const { return n - at(l); }

  /// Series whose defect is not close to an integer; these shift states out of the fan.
  bool core_shifted(int l, double threshold = 0.05) const {
    const double d = at(l);
    return std::abs(d - std::round(d)) > threshold;
  }

  void validate() const {
    require(l_hydrogenic >= 0, "l_hydrogenic must be non-negative");
    for (double d : delta) require(d >= 0 && std::isfinite(d), "quantum defects must be >= 0");
  }
};

/// Parses "key = value" lines: integer keys are l indices, plus "l_hydrogenic".
/// '#' starts a comment. l_hydrogenic defaults to one past the largest listed l.
inline DefectTable parse_defect_table(std::istream& in) {
  DefectTable table;
  int l_h = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos)
      throw ConfigError("defect table line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      std::size_t used = 0;
      if (key == "l_hydrogenic") {
        l_h = std::stoi(val, &used);
      } else {
        std::size_t kused = 0;
        const int l = std::stoi(key, &kused);
        if (kused != key.size() || l < 0) throw std::invalid_argument(key);
        const double d = std::stod(val, &used);
        if (table.delta.size() <= static_cast<std::size_t>(l))
          table.delta.resize(static_cast<std::size_t>(l) + 1, 0.0);
        table.delta[static_cast<std::size_t>(l)] = d;
      }
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::logic_error&) {
      throw ConfigError("defect table line " + std::to_string(lineno) + ": cannot parse '" +
                        line + "'");
    }
  }
  table.l_hydrogenic = l_h >= 0 ? l_h : static_cast<int>(table.delta.size());
  try {
    table.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("defect table: ") + e.what());
  }
  return table;
}

inline DefectTable load_defect_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open defect table '" + path + "'");
  return parse_defect_table(in);
}

inline std::string format_defect_table(const DefectTable& t) {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t l = 0; l < t.delta.size(); ++l) os << l << " = " << t.delta[l] << '\n';
  os << "l_hydrogenic = " << t.l_hydrogenic << '\n';
  return os.str();
}

}  // namespace rydcirc
