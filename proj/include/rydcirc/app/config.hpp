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

// Run configuration: INI files with [sections] and `key = value` lines.
//
// Every numeric key carries its unit in the name and is converted to SI here,
// once. Suffixes:
//   _V_per_cm  _V_per_m  _GHz _MHz _kHz _Hz (cyclic, stored in Hz)
//   _over_2pi_MHz _over_2pi_kHz (angular, stored in rad/s)
//   _us _ns _s  _rad  _ea0 (dipole in e a0, stored in C m)
// Keys without a suffix are dimensionless. Unknown sections or keys are errors.

#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rydcirc/constants.hpp"
#include "rydcirc/error.hpp"

namespace rydcirc {

enum class KeyKind { kNumber, kInteger, kBool, kString, kPath };

struct KeySpec {
  std::string section;
  std::string key;
  KeyKind kind = KeyKind::kNumber;
  std::string default_value;  ///< empty for optional string/path keys
  std::string help;
};

/// SI factor implied by a key's unit suffix (1 when dimensionless).
inline double unit_factor(const std::string& key) {
  struct Suffix {
    const char* text;
    double factor;
  };
  static const Suffix kSuffixes[] = {
      {"_over_2pi_MHz", kTwoPi * 1e6},
      {"_over_2pi_kHz", kTwoPi * 1e3},
      {"_V_per_cm", 100.0},
      {"_V_per_m", 1.0},
      {"_GHz", 1e9},
      {"_MHz", 1e6},
      {"_kHz", 1e3},
      {"_Hz", 1.0},
      {"_us", 1e-6},
      {"_ns", 1e-9},
      {"_rad", 1.0},
      {"_ea0", 1.602176634e-19 * 5.29177210903e-11},
      {"_s", 1.0},
  };
  for (const auto& s : kSuffixes) {
    const std::string t = s.text;
    if (key.size() > t.size() && key.compare(key.size() - t.size(), t.size(), t) == 0) return s.factor;
  }
  return 1.0;
}

class RunConfig {
 public:
  RunConfig() = default;
  RunConfig(std::vector<KeySpec> schema, std::filesystem::path base) : schema_(std::move(schema)), base_(std::move(base)) {
    for (const auto& k : schema_) raw_[id(k.section, k.key)] = k.default_value;
  }

  /// Parses `text` against the schema.
  static RunConfig parse(std::istream& in, std::vector<KeySpec> schema, std::filesystem::path base = ".") {
    RunConfig cfg(std::move(schema), std::move(base));
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(std::string("config syntax error: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty())
        throw ConfigError("key '" + section + "' must be inside a [section]");
      for (const auto& [key, value] : body) {
        const std::string full = id(section, key);
        if (!cfg.raw_.count(full)) throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
        cfg.raw_[full] = value.data();
      }
    }
    cfg.check();
    return cfg;
  }

  static RunConfig load(const std::filesystem::path& path, std::vector<KeySpec> schema) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse(in, std::move(schema), path.parent_path());
  }

  /// Overrides one value (same checks as a file entry).
  void set(const std::string& section, const std::string& key, const std::string& value) {
    const std::string full = id(section, key);
    if (!raw_.count(full)) throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    raw_[full] = value;
    check();
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto it = raw_.find(id(section, key));
    return it != raw_.end() && !it->second.empty();
  }

  /// Numeric value converted to SI.
  double si(const std::string& section, const std::string& key) const {
    return number(spec(section, key)) * unit_factor(key);
  }
  long integer(const std::string& section, const std::string& key) const {
    const auto& k = spec(section, key);
    require_kind(k, KeyKind::kInteger);
    return parse_integer(k, raw(k));
  }
  bool flag(const std::string& section, const std::string& key) const {
    const auto& k = spec(section, key);
    require_kind(k, KeyKind::kBool);
    return parse_bool(k, raw(k));
  }
  std::string string(const std::string& section, const std::string& key) const {
    return raw(spec(section, key));
  }
  /// Path key resolved against the config file's directory; nullopt when unset.
  std::optional<std::filesystem::path> path(const std::string& section, const std::string& key) const {
    const auto& k = spec(section, key);
    require_kind(k, KeyKind::kPath);
    const std::string v = raw(k);
    if (v.empty()) return std::nullopt;
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base_ / p;
  }

  const std::vector<KeySpec>& schema() const { return schema_; }

  /// Fully resolved configuration as INI text (defaults included), schema order.
  std::string to_ini() const {
    std::ostringstream os;
    std::string section;
    for (const auto& k : schema_) {
      if (k.section != section) {
        if (!section.empty()) os << '\n';
        section = k.section;
        os << '[' << section << "]\n";
      }
      os << k.key << " = " << raw(k) << '\n';
    }
    return os.str();
  }

  /// (section, key, value-as-written) in schema order.
  std::vector<std::tuple<std::string, std::string, std::string>> entries() const {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& k : schema_) out.emplace_back(k.section, k.key, raw(k));
    return out;
  }

 private:
  static std::string id(const std::string& s, const std::string& k) { return s + "." + k; }

  const KeySpec& spec(const std::string& section, const std::string& key) const {
    for (const auto& k : schema_)
      if (k.section == section && k.key == key) return k;
    throw ConfigError("internal: key '" + key + "' not declared in section [" + section + "]");
  }
  std::string raw(const KeySpec& k) const { return raw_.at(id(k.section, k.key)); }

  static void require_kind(const KeySpec& k, KeyKind kind) {
    if (k.kind != kind) throw ConfigError("internal: key '" + k.key + "' accessed with the wrong type");
  }

  static double parse_number(const KeySpec& k, const std::string& v) {
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
      return x;
    } catch (const std::logic_error&) {
      throw ConfigError("[" + k.section + "] " + k.key + ": expected a number, got '" + v + "'");
    }
  }
  static long parse_integer(const KeySpec& k, const std::string& v) {
    try {
      std::size_t used = 0;
      const long x = std::stol(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::logic_error&) {
      throw ConfigError("[" + k.section + "] " + k.key + ": expected an integer, got '" + v + "'");
    }
  }
  static bool parse_bool(const KeySpec& k, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("[" + k.section + "] " + k.key + ": expected true or false, got '" + v + "'");
  }

  double number(const KeySpec& k) const {
    if (k.kind == KeyKind::kInteger) return static_cast<double>(parse_integer(k, raw(k)));
    require_kind(k, KeyKind::kNumber);
    return parse_number(k, raw(k));
  }

  void check() const {
    for (const auto& k : schema_) {
      const std::string v = raw(k);
      switch (k.kind) {
        case KeyKind::kNumber: parse_number(k, v); break;
        case KeyKind::kInteger: parse_integer(k, v); break;
        case KeyKind::kBool: parse_bool(k, v); break;
        case KeyKind::kString: break;
        case KeyKind::kPath:
          if (!v.empty()) {
            const auto p = path(k.section, k.key);
            if (!std::filesystem::exists(*p))
              throw ConfigError("[" + k.section + "] " + k.key + ": file '" + p->string() + "' does not exist");
          }
          break;
      }
    }
  }

  std::vector<KeySpec> schema_;
  std::filesystem::path base_ = ".";
  std::map<std::string, std::string> raw_;
};

}  // namespace rydcirc
