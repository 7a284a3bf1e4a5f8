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

// Named experiment recipes behind the command-line tool.
//
// Each recipe owns a config schema, computes its results, writes CSV files
// into the output directory and returns a summary record that embeds the
// fully resolved configuration.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rydcirc/app/config.hpp"
#include "rydcirc/constants.hpp"
#include "rydcirc/dynamics/protocols.hpp"
#include "rydcirc/experiments/analysis.hpp"
#include "rydcirc/experiments/detection.hpp"
#include "rydcirc/experiments/rabi_experiment.hpp"
#include "rydcirc/experiments/spectroscopy.hpp"
#include "rydcirc/manifold/defects.hpp"
#include "rydcirc/manifold/rb_stark.hpp"
#include "rydcirc/pulse/optimize.hpp"
#include "rydcirc/rf/polarization.hpp"
#include "rydcirc/util/parallel.hpp"

namespace rydcirc {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

/// Output files of one run, written in order after the computation.
struct RunOutputs {
  std::vector<std::pair<std::string, std::string>> files;  ///< name, content
  Json results = Json::object();
};

struct RecipeContext {
  const RunConfig& config;
  unsigned workers = 1;
};

struct Recipe {
  std::string name;
  std::string description;
  std::function<std::vector<KeySpec>()> schema;
  std::function<RunOutputs(const RecipeContext&)> run;
};

namespace recipes {

inline std::vector<KeySpec> common_schema(const std::string& model, int n) {
  return {
      {"run", "model", KeyKind::kString, model, "hydrogen or rb"},
      {"run", "n", KeyKind::kInteger, std::to_string(n), "principal quantum number"},
      {"run", "seed", KeyKind::kInteger, "1", "random seed"},
      {"physics", "omega_rf_over_2pi_MHz", KeyKind::kNumber, "230", "rf carrier"},
      {"physics", "defects_file", KeyKind::kPath, "", "quantum-defect table (default 85Rb)"},
      {"physics", "window", KeyKind::kInteger, "3", "manifolds in the Rb basis"},
      {"physics", "cutoff_GHz", KeyKind::kNumber, "0.6", "rotating-frame cutoff of the Rb dynamics basis"},
  };
}

inline std::vector<KeySpec> join(std::vector<KeySpec> a, const std::vector<KeySpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline DefectTable defects_of(const RunConfig& c) {
  if (const auto p = c.path("physics", "defects_file")) return load_defect_table(p->string());
  return DefectTable::rubidium85();
}

inline TransferModelConfig model_config(const RunConfig& c) {
  TransferModelConfig m;
  m.kind = model_kind_from(c.string("run", "model"));
  m.n = static_cast<int>(c.integer("run", "n"));
  m.omega_rf = c.si("physics", "omega_rf_over_2pi_MHz");
  m.defects = defects_of(c);
  m.window = static_cast<int>(c.integer("physics", "window"));
  m.cutoff_hz = c.si("physics", "cutoff_GHz");
  return m;
}

inline Json config_json(const RunConfig& c) {
  Json j = Json::object();
  for (const auto& [s, k, v] : c.entries()) j[s][k] = v;
  return j;
}

inline Json populations_json(const LevelPopulations& p) {
  Json j = Json::object();
  for (std::size_t k = 0; k < kNamedLevels.size(); ++k) j[std::string(name_of(kNamedLevels[k]))] = p.named[k];
  j["other"] = p.other;
  return j;
}

inline Json fit_json(const FitResult& f) {
  Json j = Json::object();
  for (std::size_t k = 0; k < f.names.size(); ++k) {
    j[f.names[k]] = f.params(static_cast<Eigen::Index>(k));
    j[f.names[k] + "_sigma"] = f.sigmas(static_cast<Eigen::Index>(k));
  }
  j["residual_norm"] = f.residual_norm;
  j["ok"] = f.ok;
  if (!f.message.empty()) j["message"] = f.message;
  return j;
}

inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

/// d_ii' from the Rb diagonalization at (n, F), or the configured override.
inline double iip_dipole(const RunConfig& c, const std::string& section) {
  const double d = c.si(section, "dipole_ea0");
  if (d > 0) return d;
  const int n = static_cast<int>(c.integer("run", "n"));
  const RbStarkModel model(n, defects_of(c), static_cast<int>(c.integer("physics", "window")));
  return model.dipole_moment(resolve(NamedLevel::kI, n), resolve(NamedLevel::kIPrime, n), c.si(section, "F0_V_per_cm"));
}

// --- starkmap -------------------------------------------------------------

inline std::vector<KeySpec> starkmap_schema() {
  return join(common_schema("hydrogen", 51),
              {{"starkmap", "field_start_V_per_cm", KeyKind::kNumber, "0", ""},
               {"starkmap", "field_stop_V_per_cm", KeyKind::kNumber, "3", ""},
               {"starkmap", "field_points", KeyKind::kInteger, "31", ""},
               {"starkmap", "m", KeyKind::kInteger, "2", "magnetic quantum number of the block"}});
}

inline RunOutputs starkmap(const RecipeContext& ctx) {
  const auto& c = ctx.config;
  const auto cfg = model_config(c);
  const int n = cfg.n;
  const int m = static_cast<int>(c.integer("starkmap", "m"));
  require(m >= 0 && m < n, "starkmap needs 0 <= m < n");
  const auto points = c.integer("starkmap", "field_points");
  require(points >= 1, "field_points must be >= 1");
  const double f0 = c.si("starkmap", "field_start_V_per_cm");
  const double f1 = c.si("starkmap", "field_stop_V_per_cm");
  require(f0 >= 0 && f1 >= f0, "field range must satisfy 0 <= start <= stop");
  std::vector<double> fields = points == 1 ? std::vector<double>{f0} : uniform_grid(f0, f1, static_cast<std::size_t>(points));
  const int count = n - m;  // n1 = 0 .. n - m - 1

  std::vector<std::vector<double>> offsets;  // per field, per n1, MHz
  if (cfg.kind == ModelKind::kHydrogen) {
    for (double f : fields) {
      std::vector<double> row;
      for (int n1 = 0; n1 < count; ++n1)
        row.push_back(first_order_energy(ParabolicState::make(n, n1, m), f) / constants().h / 1e6);
      offsets.push_back(row);
    }
  } else {
    const RbStarkModel model(n, cfg.defects, cfg.window);
    const double centre = -rubidium85_rydberg_hz() / (n * 1.0 * n);
    offsets = parallel_map(fields.size(), ctx.workers, [&](std::size_t q) {
      const auto blk = model.diagonalize(m, fields[q]);
      std::vector<double> row(static_cast<std::size_t>(count), std::numeric_limits<double>::quiet_NaN());
      for (int n1 = 0; n1 < count; ++n1) {
        const auto col = blk.column_of(n1);
        if (col >= 0) row[static_cast<std::size_t>(n1)] = (blk.energies(col) - centre) / 1e6;
      }
      return row;
    });
  }

  std::ostringstream csv;
  csv << "field_V_per_cm";
  for (int n1 = 0; n1 < count; ++n1) csv << ',' << to_string(ParabolicState::make(n, n1, m));
  csv << '\n';
  double max_abs_first = 0;
  for (std::size_t q = 0; q < fields.size(); ++q) {
    csv << csv_number(fields[q] / 100.0);
    for (double v : offsets[q]) {
      csv << ',' << csv_number(v);
      if (q == 0 && std::isfinite(v)) max_abs_first = std::max(max_abs_first, std::abs(v));
    }
    csv << '\n';
  }
  RunOutputs out;
  out.files.emplace_back("starkmap.csv", csv.str());
  out.results["levels"] = count;
  out.results["m"] = m;
  out.results["offset_units"] = "MHz relative to -Ry/n^2";
  out.results["max_abs_offset_at_first_field_MHz"] = max_abs_first;
  out.results["stark_frequency_at_last_field_over_2pi_MHz"] = stark_frequency(n, fields.back()) / (kTwoPi * 1e6);
  return out;
}

// --- rabi -----------------------------------------------------------------

inline std::vector<KeySpec> rabi_schema() {
  return join(common_schema("rb", 51),
              {{"rabi", "rabi_over_2pi_MHz", KeyKind::kNumber, "3.52", ""},
               {"rabi", "delta_over_2pi_MHz", KeyKind::kNumber, "0", "ladder detuning set by the static field"},
               {"rabi", "t_max_us", KeyKind::kNumber, "6", ""},
               {"rabi", "points", KeyKind::kInteger, "1201", ""},
               {"rabi", "duration_offset_ns", KeyKind::kNumber, "0", "effective = nominal + offset"},
               {"rabi", "atoms", KeyKind::kInteger, "0", "binomial sampling per point; 0 = exact"},
               {"rabi", "fit", KeyKind::kBool, "false", "fit (Omega, offset) to the scan"}});
}

inline RunOutputs rabi(const RecipeContext& ctx) {
  const auto& c = ctx.config;
  const TransferModel model(model_config(c));
  const double om = c.si("rabi", "rabi_over_2pi_MHz");
  const double delta = c.si("rabi", "delta_over_2pi_MHz");
  require(om > 0, "rabi_over_2pi_MHz must be positive");
  const auto points = c.integer("rabi", "points");
  require(points >= 2, "points must be >= 2");
  const auto grid = uniform_grid(0.0, c.si("rabi", "t_max_us"), static_cast<std::size_t>(points));
  const double offset = c.si("rabi", "duration_offset_ns");
  RunOutputs out;
  Trajectory tr;
  Json fit = nullptr;
  if (delta == 0.0) {
    RabiScanOptions opt;
    opt.duration_offset = offset;
    opt.atoms = static_cast<int>(c.integer("rabi", "atoms"));
    opt.seed = static_cast<std::uint64_t>(c.integer("run", "seed"));
    opt.fit = c.flag("rabi", "fit");
    const auto r = rabi_scan_experiment(model, om, grid, opt);
    tr = r.data;
    if (opt.fit) {
      fit = fit_json(r.fit);
      fit["omega_over_2pi_MHz_fitted"] = r.rabi / (kTwoPi * 1e6);
      fit["offset_ns_fitted"] = r.offset * 1e9;
    }
  } else {
    require(!c.flag("rabi", "fit"), "fitting is only supported for resonant scans");
    require(c.integer("rabi", "atoms") == 0, "binomial sampling is only supported for resonant scans");
    tr = model.rabi_scan(om, delta, effective_durations(grid, offset));
    tr.times = grid;
  }
  std::ostringstream csv;
  write_trajectory_csv(csv, tr);
  out.files.emplace_back("rabi.csv", csv.str());

  const auto pc = tr.series(NamedLevel::kC);
  const auto peaks = find_maxima(tr.times, pc);
  out.results["maxima"] = peaks.size();
  out.results["mean_spacing_ns"] = mean_spacing(tr.times, peaks) * 1e9;
  if (!peaks.empty()) {
    out.results["first_peak_time_ns"] = tr.times[peaks.front()] * 1e9;
    out.results["first_peak_P_c"] = pc[peaks.front()];
  }
  out.results["final"] = populations_json(tr.populations.back());
  out.results["fit"] = fit;
  return out;
}

// --- adiabatic ------------------------------------------------------------

inline std::vector<KeySpec> adiabatic_schema() {
  return join(common_schema("rb", 51),
              {{"adiabatic", "rabi_over_2pi_MHz", KeyKind::kNumber, "3.5", ""},
               {"adiabatic", "f_start_V_per_cm", KeyKind::kNumber, "2.45", ""},
               {"adiabatic", "f_end_V_per_cm", KeyKind::kNumber, "2.24", ""},
               {"adiabatic", "ramp_us", KeyKind::kNumber, "1.5", ""},
               {"adiabatic", "rise_us", KeyKind::kNumber, "1", "rf rise at the start field"},
               {"adiabatic", "fall_us", KeyKind::kNumber, "1", "rf fall at the end field"},
               {"adiabatic", "shape", KeyKind::kString, "linear", "rf edge shape: linear or cosine"},
               {"adiabatic", "samples", KeyKind::kInteger, "351", "trajectory samples"},
               {"adiabatic", "sweep_rabi_min_over_2pi_MHz", KeyKind::kNumber, "0.2", ""},
               {"adiabatic", "sweep_rabi_max_over_2pi_MHz", KeyKind::kNumber, "4", ""},
               {"adiabatic", "sweep_points", KeyKind::kInteger, "0", "P_c versus Omega_rf; 0 = off"},
               {"adiabatic", "eta0", KeyKind::kNumber, "0.23", "detection efficiency of c relative to i"}});
}

inline RampShape ramp_shape_from(const std::string& s) {
  if (s == "linear") return RampShape::kLinear;
  if (s == "cosine") return RampShape::kCosine;
  throw ConfigError("[adiabatic] shape: expected linear or cosine, got '" + s + "'");
}

inline RunOutputs adiabatic(const RecipeContext& ctx) {
  const auto& c = ctx.config;
  const TransferModel model(model_config(c));
  FieldRamp ramp;
  ramp.f_start = c.si("adiabatic", "f_start_V_per_cm");
  ramp.f_end = c.si("adiabatic", "f_end_V_per_cm");
  ramp.duration = c.si("adiabatic", "ramp_us");
  ramp.pre_hold = c.si("adiabatic", "rise_us");
  ramp.post_hold = c.si("adiabatic", "fall_us");
  const auto shape = ramp_shape_from(c.string("adiabatic", "shape"));
  const double om = c.si("adiabatic", "rabi_over_2pi_MHz");
  const auto samples = c.integer("adiabatic", "samples");
  require(samples >= 2, "samples must be >= 2");
  const auto res = model.adiabatic_passage(om, ramp, shape, static_cast<std::size_t>(samples));

  RunOutputs out;
  std::ostringstream csv;
  write_trajectory_csv(csv, res.trajectory);
  out.files.emplace_back("adiabatic.csv", csv.str());
  const auto& f = res.final;
  using L = NamedLevel;
  out.results["P_c"] = f[L::kC];
  out.results["P_dfg_sum"] = f[L::kD] + f[L::kE] + f[L::kF] + f[L::kG];
  out.results["final"] = populations_json(f);
  out.results["delta_start_over_2pi_MHz"] = res.delta_start / (kTwoPi * 1e6);
  out.results["delta_end_over_2pi_MHz"] = res.delta_end / (kTwoPi * 1e6);

  // Field-ionization readout of the initial level and after the passage.
  const auto ion = IonizationModel::defaults(c.si("adiabatic", "eta0"));
  const auto fields = uniform_grid(0.8, 2.2, 701);
  LevelPopulations initial;
  initial.named[static_cast<std::size_t>(L::kI)] = 1.0;
  const auto before = ionization_spectrum(initial, ion, fields);
  const auto after = ionization_spectrum(f, ion, fields);
  std::ostringstream sp;
  sp << "ionization_field_au,signal_initial,signal_after\n";
  for (std::size_t q = 0; q < fields.size(); ++q)
    sp << csv_number(fields[q]) << ',' << csv_number(before[q]) << ',' << csv_number(after[q]) << '\n';
  out.files.emplace_back("adiabatic_spectrum.csv", sp.str());
  out.results["ionization_field_units"] = "arbitrary (placeholder thresholds)";
  out.results["transfer_from_residual_i"] = transfer_from_residual(fields, before, after, ion);

  const auto sweep = c.integer("adiabatic", "sweep_points");
  if (sweep > 0) {
    const double a = c.si("adiabatic", "sweep_rabi_min_over_2pi_MHz");
    const double b = c.si("adiabatic", "sweep_rabi_max_over_2pi_MHz");
    require(a > 0 && b >= a, "sweep range must satisfy 0 < min <= max");
    const auto rabis = sweep == 1 ? std::vector<double>{a} : uniform_grid(a, b, static_cast<std::size_t>(sweep));
    const auto finals = parallel_map(rabis.size(), ctx.workers,
                                     [&](std::size_t q) { return model.adiabatic_passage(rabis[q], ramp, shape).final; });
    std::ostringstream sw;
    sw << "rabi_over_2pi_MHz,P_c,P_dfg_sum,P_i\n";
    for (std::size_t q = 0; q < rabis.size(); ++q) {
      const auto& p = finals[q];
      sw << csv_number(rabis[q] / (kTwoPi * 1e6)) << ',' << csv_number(p[L::kC]) << ','
         << csv_number(p[L::kD] + p[L::kE] + p[L::kF] + p[L::kG]) << ',' << csv_number(p[L::kI]) << '\n';
    }
    out.files.emplace_back("adiabatic_sweep.csv", sw.str());
    out.results["sweep_points"] = rabis.size();
  }
  return out;
}

// --- calibrate-polarization ---------------------------------------------

inline std::vector<KeySpec> polarization_schema() {
  return join(common_schema("rb", 52),
              {{"polarization", "F0_V_per_cm", KeyKind::kNumber, "1.76", "static field of the i -> i' measurement"},
               {"polarization", "dipole_ea0", KeyKind::kNumber, "0", "d_ii'; 0 = from the Rb diagonalization"},
               {"polarization", "transfer_matrix_file", KeyKind::kPath, "", "default: ideal quadrupole, 1 V/m per unit"},
               {"polarization", "drives_file", KeyKind::kPath, "", "initial drives (default: unit amplitudes, zero phases)"},
               {"polarization", "perturb_amplitude", KeyKind::kNumber, "0", "random relative imbalance of T entries"},
               {"polarization", "perturb_phase_rad", KeyKind::kNumber, "0", ""},
               {"polarization", "perturb_seed", KeyKind::kInteger, "1", ""},
               {"polarization", "noise", KeyKind::kNumber, "0", "relative Gaussian noise per measurement"},
               {"polarization", "passes", KeyKind::kInteger, "1", ""},
               {"polarization", "monte_carlo_runs", KeyKind::kInteger, "0", "repeat with seeds seed, seed+1, ..."},
               {"polarization", "target_ladder_rabi_over_2pi_MHz", KeyKind::kNumber, "3.52",
                "global scale of the final drives for the n = 51 ladder"}});
}

inline RunOutputs calibrate_polarization(const RecipeContext& ctx) {
  const auto& c = ctx.config;
  const double d = iip_dipole(c, "polarization");
  TransferMatrix tm = TransferMatrix::ideal(1.0);
  if (const auto p = c.path("polarization", "transfer_matrix_file")) {
    std::ifstream in(*p);
    tm = read_transfer_matrix(in);
  }
  const double pa = c.si("polarization", "perturb_amplitude");
  const double pp = c.si("polarization", "perturb_phase_rad");
  if (pa > 0 || pp > 0)
    tm = perturb_transfer_matrix(tm, pa, pp, static_cast<std::uint64_t>(c.integer("polarization", "perturb_seed")));
  ElectrodeDrive start = ElectrodeDrive::uniform(1.0);
  if (const auto p = c.path("polarization", "drives_file")) {
    std::ifstream in(*p);
    start = read_drives(in);
  }
  PolarizationOptions opt;
  opt.passes = static_cast<int>(c.integer("polarization", "passes"));
  const double noise = c.si("polarization", "noise");
  const auto seed = static_cast<std::uint64_t>(c.integer("run", "seed"));
  SimulatedOracle oracle(tm, d, noise, seed);
  const auto res = optimize_polarization(oracle, start, opt);

  const auto f0 = field_at_center(start, tm);
  const auto f1 = field_at_center(res.drives, tm);
  const double target = c.si("polarization", "target_ladder_rabi_over_2pi_MHz");
  const double scale = ladder_field_for_rabi(51, target) / std::abs(f1.e_plus);
  const auto scaled = global_scale(res.drives, scale);
  const auto rp = rabi_from_fields(f1, d);

  RunOutputs out;
  std::ostringstream audit, drives, tmo;
  write_audit_log(audit, res.audit);
  write_drives(drives, scaled);
  write_transfer_matrix(tmo, tm);
  out.files.emplace_back("polarization_audit.txt", audit.str());
  out.files.emplace_back("polarization_drives.txt", drives.str());
  out.files.emplace_back("polarization_transfer_matrix.txt", tmo.str());
  out.results["dipole_ea0"] = d / (constants().e * constants().a0);
  out.results["purity_initial"] = purity(f0);
  out.results["purity_final"] = purity(f1);
  out.results["omega_plus_over_2pi_MHz"] = rp.omega_plus / (kTwoPi * 1e6);
  out.results["omega_minus_over_2pi_kHz"] = rp.omega_minus / (kTwoPi * 1e3);
  out.results["global_scale"] = scale;
  out.results["measurements"] = oracle.count();
  const auto runs = c.integer("polarization", "monte_carlo_runs");
  if (runs > 0) {
    auto v = polarization_monte_carlo(tm, d, noise, static_cast<std::size_t>(runs), seed, start, opt, ctx.workers);
    std::ostringstream mc;
    mc << "run,seed,purity\n";
    for (std::size_t k = 0; k < v.size(); ++k) mc << k << ',' << seed + k << ',' << csv_number(v[k]) << '\n';
    out.files.emplace_back("polarization_monte_carlo.csv", mc.str());
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    std::sort(v.begin(), v.end());
    out.results["monte_carlo_mean_purity"] = mean;
    out.results["monte_carlo_median_purity"] = v[v.size() / 2];
  }
  return out;
}

// --- autler-townes -------------------------------------------------------

inline std::vector<KeySpec> autler_townes_schema() {
  return join(common_schema("rb", 52),
              {{"autler_townes", "F0_V_per_cm", KeyKind::kNumber, "1.76", ""},
               {"autler_townes", "dipole_ea0", KeyKind::kNumber, "0", "d_ii'; 0 = from the Rb diagonalization"},
               {"autler_townes", "omega_plus_over_2pi_MHz", KeyKind::kNumber, "30", ""},
               {"autler_townes", "linewidth_MHz", KeyKind::kNumber, "4", "probe-line FWHM"},
               {"autler_townes", "dressing_detuning_MHz", KeyKind::kNumber, "0", ""},
               {"autler_townes", "detuning_start_MHz", KeyKind::kNumber, "-60", ""},
               {"autler_townes", "detuning_stop_MHz", KeyKind::kNumber, "60", ""},
               {"autler_townes", "points", KeyKind::kInteger, "241", ""}});
}

inline RunOutputs autler_townes(const RecipeContext& ctx) {
  const auto& c = ctx.config;
  const double d = iip_dipole(c, "autler_townes");
  AutlerTownesOptions opt;
  opt.dipole = d;
  opt.linewidth_fwhm_hz = c.si("autler_townes", "linewidth_MHz");
  opt.dressing_detuning_hz = c.si("autler_townes", "dressing_detuning_MHz");
  const auto points = c.integer("autler_townes", "points");
  require(points >= 6, "points must be >= 6");
  const auto grid = uniform_grid(c.si("autler_townes", "detuning_start_MHz"), c.si("autler_townes", "detuning_stop_MHz"),
                                 static_cast<std::size_t>(points));
  const double om = c.si("autler_townes", "omega_plus_over_2pi_MHz");
  const auto r = autler_townes_experiment(om > 0 ? cplx(field_from_rabi(om, d)) : cplx(0.0), grid, opt);
  RunOutputs out;
  std::ostringstream csv;
  csv << "probe_detuning_MHz,signal\n";
  for (std::size_t q = 0; q < grid.size(); ++q) csv << csv_number(grid[q] * 1e-6) << ',' << csv_number(r.signal[q]) << '\n';
  out.files.emplace_back("autler_townes.csv", csv.str());
  out.results["resolved"] = r.resolved;
  out.results["splitting_MHz"] = r.splitting_hz * 1e-6;
  out.results["omega_plus_over_2pi_MHz_fitted"] = r.omega_plus / (kTwoPi * 1e6);
  out.results["lines"] = Json::array({Json{{"position_MHz", r.lines[0].position_hz * 1e-6}, {"weight", r.lines[0].weight}},
                                      Json{{"position_MHz", r.lines[1].position_hz * 1e-6}, {"weight", r.lines[1].weight}}});
  out.results["fit"] = fit_json(r.fit);
  return out;
}

// --- sigma-minus ----------------------------------------------------------

inline std::vector<KeySpec> sigma_minus_schema() {
  return join(common_schema("rb", 52),
              {{"sigma_minus", "F0_V_per_cm", KeyKind::kNumber, "1.76", ""},
               {"sigma_minus", "dipole_ea0", KeyKind::kNumber, "0", "d_ii'; 0 = from the Rb diagonalization"},
               {"sigma_minus", "omega_minus_over_2pi_kHz", KeyKind::kNumber, "107", ""},
               {"sigma_minus", "omega_plus_over_2pi_MHz", KeyKind::kNumber, "30", "for the purity estimate"},
               {"sigma_minus", "t_max_us", KeyKind::kNumber, "12", ""},
               {"sigma_minus", "points", KeyKind::kInteger, "121", ""},
               {"sigma_minus", "atoms", KeyKind::kInteger, "100", "binomial sampling per point; 0 = exact"}});
}

inline RunOutputs sigma_minus(const RecipeContext& ctx) {
  const auto& c = ctx.config;
  const double d = iip_dipole(c, "sigma_minus");
  SigmaMinusOptions opt;
  opt.dipole = d;
  opt.atoms = static_cast<int>(c.integer("sigma_minus", "atoms"));
  opt.seed = static_cast<std::uint64_t>(c.integer("run", "seed"));
  const auto points = c.integer("sigma_minus", "points");
  require(points >= 3, "points must be >= 3");
  const auto grid = uniform_grid(0.0, c.si("sigma_minus", "t_max_us"), static_cast<std::size_t>(points));
  const double om = c.si("sigma_minus", "omega_minus_over_2pi_kHz");
  const auto r = sigma_minus_rabi_experiment(om > 0 ? cplx(field_from_rabi(om, d)) : cplx(0.0), grid, opt);
  RunOutputs out;
  std::ostringstream csv;
  csv << "time_us,P_iprime,error\n";
  for (std::size_t q = 0; q < grid.size(); ++q)
    csv << csv_number(grid[q] * 1e6) << ',' << csv_number(r.population[q]) << ',' << csv_number(r.error[q]) << '\n';
  out.files.emplace_back("sigma_minus.csv", csv.str());
  out.results["flat"] = r.flat;
  out.results["fit"] = fit_json(r.fit);
  if (!r.flat) {
    out.results["omega_minus_over_2pi_kHz_fitted"] = r.omega_minus / (kTwoPi * 1e3);
    out.results["half_period_us"] = r.half_period * 1e6;
    const double wp = c.si("sigma_minus", "omega_plus_over_2pi_MHz");
    out.results["purity"] = purity(wp, r.omega_minus);
  }
  return out;
}

// --- optimize-pulse -------------------------------------------------------

inline std::vector<KeySpec> optimize_schema() {
  return join(common_schema("rb", 51),
              {{"optimize", "reference_field_V_per_cm", KeyKind::kNumber, "2.345", "static field of the Rb model"},
               {"optimize", "segments", KeyKind::kInteger, "16", ""},
               {"optimize", "budget_ns", KeyKind::kNumber, "400", "total time budget"},
               {"optimize", "omega_max_over_2pi_MHz", KeyKind::kNumber, "10", ""},
               {"optimize", "delta_max_over_2pi_MHz", KeyKind::kNumber, "20", ""},
               {"optimize", "method", KeyKind::kString, "gradient", "gradient or derivative-free"},
               {"optimize", "starts", KeyKind::kInteger, "16", "seeded random starts"},
               {"optimize", "max_iterations", KeyKind::kInteger, "2000", ""},
               {"optimize", "free_durations", KeyKind::kBool, "false", ""},
               {"optimize", "baseline_rabi_over_2pi_MHz", KeyKind::kNumber, "3.52", "single-segment reference"},
               {"optimize", "schedule_file", KeyKind::kPath, "", "re-simulate this schedule instead of optimizing"}});
}

inline RunOutputs optimize_pulse(const RecipeContext& ctx) {
  const auto& c = ctx.config;
  const auto cfg = model_config(c);
  std::shared_ptr<const ControlSystem> sys;
  if (cfg.kind == ModelKind::kHydrogen) {
    sys = std::make_shared<const ControlSystem>(hydrogen_ladder_system(cfg.n));
  } else {
    const TransferModel model(cfg);
    sys = std::make_shared<const ControlSystem>(rb_control_system(*model.rb_basis(c.si("optimize", "reference_field_V_per_cm"))));
  }
  ScheduleBounds b;
  b.omega_max = c.si("optimize", "omega_max_over_2pi_MHz");
  b.delta_max = c.si("optimize", "delta_max_over_2pi_MHz");
  b.time_budget = c.si("optimize", "budget_ns");
  b.validate();

  // Single resonant segment: best P_c over durations within the budget.
  const double w0 = c.si("optimize", "baseline_rabi_over_2pi_MHz");
  require(w0 > 0 && w0 <= b.omega_max, "baseline Rabi frequency must lie in (0, omega_max]");
  double base_f = 0, base_t = 0;
  for (int q = 1; q <= 400; ++q) {
    const double t = b.time_budget * q / 400.0;
    const double f = fidelity(PulseSchedule::single(t, w0, 0.0, b), sys);
    if (f > base_f) {
      base_f = f;
      base_t = t;
    }
  }
  RunOutputs out;
  out.results["baseline_fidelity"] = base_f;
  out.results["baseline_duration_ns"] = base_t * 1e9;

  if (const auto p = c.path("optimize", "schedule_file")) {
    std::ifstream in(*p);
    const auto s = read_schedule_csv(in, b);
    out.results["fidelity"] = fidelity(s, sys);
    out.results["segments"] = s.size();
    return out;
  }
  OptimizeOptions opt;
  opt.method = optimizer_method_from(c.string("optimize", "method"));
  opt.max_iterations = static_cast<int>(c.integer("optimize", "max_iterations"));
  opt.free_durations = c.flag("optimize", "free_durations");
  const auto segs = c.integer("optimize", "segments");
  const auto starts = c.integer("optimize", "starts");
  require(segs >= 1 && starts >= 1, "segments and starts must be >= 1");
  const auto ms = optimize_multistart(sys, static_cast<std::size_t>(segs), b, opt, static_cast<std::size_t>(starts),
                                      static_cast<std::uint64_t>(c.integer("run", "seed")), ctx.workers);
  const auto& best = ms.runs[ms.best];
  std::ostringstream sched, trace;
  write_schedule_csv(sched, best.schedule);
  trace << "iteration,fidelity,gradient_norm\n";
  for (std::size_t k = 0; k < best.fidelity_trace.size(); ++k)
    trace << k << ',' << csv_number(best.fidelity_trace[k]) << ','
          << (k < best.gradient_norms.size() ? csv_number(best.gradient_norms[k]) : std::string("")) << '\n';
  out.files.emplace_back("schedule.csv", sched.str());
  out.files.emplace_back("optimization_trace.csv", trace.str());
  out.results["method"] = best.method;
  out.results["best_fidelity"] = ms.best_fidelity;
  out.results["best_start"] = ms.best;
  out.results["mean_fidelity"] = ms.mean_fidelity;
  out.results["std_fidelity"] = ms.std_fidelity;
  out.results["min_fidelity"] = ms.min_fidelity;
  out.results["fidelity_resimulated"] = fidelity(best.schedule, sys);
  Json runs = Json::array();
  for (const auto& r : ms.runs)
    runs.push_back(Json{{"fidelity", r.fidelity}, {"iterations", r.iterations}, {"termination", r.termination}});
  out.results["starts"] = runs;
  return out;
}

}  // namespace recipes

inline const std::vector<Recipe>& all_recipes() {
  static const std::vector<Recipe> list{
      {"starkmap", "level energies versus static field", recipes::starkmap_schema, recipes::starkmap},
      {"rabi", "resonant Rabi scan i -> c", recipes::rabi_schema, recipes::rabi},
      {"adiabatic", "rf adiabatic passage i -> c", recipes::adiabatic_schema, recipes::adiabatic},
      {"calibrate-polarization", "four-electrode sigma+ calibration", recipes::polarization_schema,
       recipes::calibrate_polarization},
      {"autler-townes", "Autler-Townes doublet of i -> i'", recipes::autler_townes_schema, recipes::autler_townes},
      {"sigma-minus", "sigma- Rabi oscillation on i -> i'", recipes::sigma_minus_schema, recipes::sigma_minus},
      {"optimize-pulse", "optimal control of the i -> c transfer", recipes::optimize_schema, recipes::optimize_pulse},
  };
  return list;
}

inline const Recipe& find_recipe(const std::string& name) {
  for (const auto& r : all_recipes())
    if (r.name == name) return r;
  throw InvalidArgument("unknown recipe '" + name + "'");
}

inline std::string version_string() {
  std::ostringstream os;
  os << "rydcirc " << kVersion << " constants " << std::hex << std::setw(16) << std::setfill('0') << constants_hash();
  return os.str();
}

/// Runs a recipe and writes its files plus `<name>_summary.json` into `dir`.
inline Json run_recipe(const Recipe& r, const RunConfig& cfg, const std::filesystem::path& dir, unsigned workers) {
  const RecipeContext ctx{cfg, workers};
  RunOutputs out = r.run(ctx);
  std::filesystem::create_directories(dir);
  Json summary = Json::object();
  summary["recipe"] = r.name;
  summary["version"] = version_string();
  summary["config"] = recipes::config_json(cfg);
  summary["results"] = out.results;
  Json files = Json::array();
  for (const auto& [name, content] : out.files) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file '" + (dir / name).string() + "'");
    f << content;
    files.push_back(name);
  }
  summary["outputs"] = files;
  std::ofstream s(dir / (r.name + "_summary.json"), std::ios::binary);
  s << summary.dump(2) << '\n';
  return summary;
}

}  // namespace rydcirc
