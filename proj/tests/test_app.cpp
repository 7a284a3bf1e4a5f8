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
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rydcirc/app/recipes.hpp"

namespace rydcirc {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rydcirc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig config_for(const std::string& recipe, const std::string& text = "") {
  std::istringstream in(text);
  return RunConfig::parse(in, find_recipe(recipe).schema());
}

struct Shell {
  int code;
  std::string out;
};

Shell run_cli(const std::string& args) {
  const std::string cmd = std::string(RYDCIRC_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

TEST(Config, UnitsConvertToSi) {
  EXPECT_DOUBLE_EQ(unit_factor("F0_V_per_cm"), 100.0);
  EXPECT_DOUBLE_EQ(unit_factor("rabi_over_2pi_MHz"), kTwoPi * 1e6);
  EXPECT_DOUBLE_EQ(unit_factor("omega_minus_over_2pi_kHz"), kTwoPi * 1e3);
  EXPECT_DOUBLE_EQ(unit_factor("t_max_us"), 1e-6);
  EXPECT_DOUBLE_EQ(unit_factor("budget_ns"), 1e-9);
  EXPECT_DOUBLE_EQ(unit_factor("cutoff_GHz"), 1e9);
  EXPECT_DOUBLE_EQ(unit_factor("segments"), 1.0);
  const auto c = config_for("rabi", "[rabi]\nt_max_us = 2.5\n");
  EXPECT_DOUBLE_EQ(c.si("rabi", "t_max_us"), 2.5e-6);
  EXPECT_EQ(c.integer("rabi", "points"), 1201);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(config_for("rabi", "[rabi]\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(config_for("rabi", "[nosuch]\npoints = 1\n"), ConfigError);
  EXPECT_THROW(config_for("rabi", "[rabi]\npoints = 1.5\n"), ConfigError);
  EXPECT_THROW(config_for("rabi", "[rabi]\nfit = maybe\n"), ConfigError);
  EXPECT_THROW(config_for("rabi", "[rabi]\nt_max_us = fast\n"), ConfigError);
  EXPECT_THROW(config_for("rabi", "[physics]\ndefects_file = /no/such/file\n"), ConfigError);
  auto c = config_for("rabi");
  EXPECT_THROW(c.set("rabi", "nope", "1"), ConfigError);
  EXPECT_THROW(find_recipe("plot"), InvalidArgument);
}

TEST(Config, ResolvedConfigRoundTrips) {
  const auto c = config_for("adiabatic", "[adiabatic]\nrabi_over_2pi_MHz = 1.25\n");
  std::istringstream again(c.to_ini());
  const auto d = RunConfig::parse(again, find_recipe("adiabatic").schema());
  EXPECT_EQ(c.entries(), d.entries());
}

TEST(Recipes, StarkmapAtZeroFieldIsDegenerate) {
  const auto c = config_for("starkmap", "[starkmap]\nfield_start_V_per_cm = 0\nfield_stop_V_per_cm = 0\nfield_points = 1\n");
  const auto s = run_recipe(find_recipe("starkmap"), c, scratch("starkmap0"), 1);
  EXPECT_EQ(s["results"]["max_abs_offset_at_first_field_MHz"].get<double>(), 0.0);
}

TEST(Recipes, SummaryEmbedsResolvedConfig) {
  const auto c = config_for("autler-townes", "[autler_townes]\npoints = 121\n");
  const auto dir = scratch("at");
  const auto s = run_recipe(find_recipe("autler-townes"), c, dir, 1);
  EXPECT_EQ(s["config"]["autler_townes"]["points"], "121");
  EXPECT_EQ(s["config"]["autler_townes"]["omega_plus_over_2pi_MHz"], "30");
  EXPECT_EQ(s["config"]["run"]["n"], "52");
  const auto disk = Json::parse(slurp(dir / "autler-townes_summary.json"));
  EXPECT_EQ(disk, s);
  for (const auto& f : s["outputs"]) EXPECT_TRUE(fs::exists(dir / f.get<std::string>()));
}

TEST(Recipes, SameSeedGivesIdenticalFiles) {
  const auto c = config_for("sigma-minus", "[run]\nseed = 5\n[sigma_minus]\natoms = 50\ndipole_ea0 = 433\n");
  const auto a = scratch("sm_a");
  const auto b = scratch("sm_b");
  const auto sa = run_recipe(find_recipe("sigma-minus"), c, a, 1);
  run_recipe(find_recipe("sigma-minus"), c, b, 2);
  for (const auto& f : sa["outputs"]) EXPECT_EQ(slurp(a / f.get<std::string>()), slurp(b / f.get<std::string>()));
  EXPECT_EQ(slurp(a / "sigma-minus_summary.json"), slurp(b / "sigma-minus_summary.json"));
  auto other = c;
  other.set("run", "seed", "6");
  const auto d = scratch("sm_c");
  const auto sd = run_recipe(find_recipe("sigma-minus"), other, d, 1);
  EXPECT_NE(slurp(a / sa["outputs"][0].get<std::string>()), slurp(d / sd["outputs"][0].get<std::string>()));
}

TEST(Recipes, PolarizationReachesCircular) {
  const auto c = config_for("calibrate-polarization", "[polarization]\nperturb_amplitude = 0.1\nperturb_phase_rad = 0.1\npasses = 2\n");
  const auto s = run_recipe(find_recipe("calibrate-polarization"), c, scratch("pol"), 1);
  EXPECT_LT(s["results"]["purity_final"].get<double>(), 1e-3);
  EXPECT_GT(s["results"]["purity_initial"].get<double>(), s["results"]["purity_final"].get<double>());
}

TEST(Recipes, OptimizeRoundTripsSchedule) {
  const auto c = config_for("optimize-pulse", "[run]\nmodel = hydrogen\n[optimize]\nsegments = 4\nstarts = 2\nmax_iterations = 200\n");
  const auto dir = scratch("opt");
  const auto s = run_recipe(find_recipe("optimize-pulse"), c, dir, 1);
  const double f = s["results"]["best_fidelity"].get<double>();
  EXPECT_GT(f, 0.999);
  const auto again = config_for("optimize-pulse", "[run]\nmodel = hydrogen\n[optimize]\nsegments = 4\nschedule_file = " +
                                                      (dir / "schedule.csv").string() + "\n");
  const auto r = run_recipe(find_recipe("optimize-pulse"), again, scratch("opt2"), 1);
  EXPECT_NEAR(r["results"]["fidelity"].get<double>(), f, 1e-9);
}

TEST(Cli, VersionPrintsConstantHash) {
  const auto r = run_cli("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, version_string() + "\n");
  EXPECT_NE(r.out.find("constants "), std::string::npos);
}

TEST(Cli, ErrorsAreMachineReadable) {
  const auto dir = scratch("cli_err");
  const auto r = run_cli("rabi -o " + dir.string() + " -s rabi.bogus=1");
  EXPECT_EQ(r.code, 2);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["error"], "config");
  EXPECT_EQ(j["exit_code"], 2);
  const auto bad = run_cli("rabi -o " + dir.string() + " -s run.n=1");
  EXPECT_NE(bad.code, 0);
  EXPECT_NO_THROW(Json::parse(bad.out));
}

TEST(Cli, RabiShowsManyOscillations) {
  const auto dir = scratch("cli_rabi");
  const auto r = run_cli("rabi -c " + std::string(RYDCIRC_CONFIGS) + "/rabi.ini -o " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto s = Json::parse(slurp(dir / "rabi_summary.json"));
  EXPECT_GE(s["results"]["maxima"].get<int>(), 20);
  EXPECT_TRUE(fs::exists(dir / "rabi.csv"));
}

TEST(Cli, AdiabaticPassagePlateau) {
  const auto dir = scratch("cli_ad");
  const auto r = run_cli("adiabatic -c " + std::string(RYDCIRC_CONFIGS) + "/adiabatic.ini -o " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto s = Json::parse(slurp(dir / "adiabatic_summary.json"));
  EXPECT_GT(s["results"]["P_c"].get<double>(), 0.95);
  EXPECT_LE(s["results"]["P_dfg_sum"].get<double>(), 0.05);
}

}  // namespace
}  // namespace rydcirc
