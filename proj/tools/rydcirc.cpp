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

// rydcirc: run an experiment recipe from an INI config.
//
//   rydcirc <recipe> [--config FILE] [--output DIR] [--set section.key=value]...
//                    [--workers N] [--print-config]
//   rydcirc --version
//
// Exit codes: 0 ok, 2 usage or config error, 3 invalid physical input,
// 4 propagation or convergence failure, 1 anything else. Failures print a
// JSON error record on stderr.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rydcirc/app/recipes.hpp"

namespace {

using rydcirc::Json;

int fail(int code, const std::string& kind, const std::string& message, const std::string& recipe) {
  Json e = Json::object();
  e["error"] = kind;
  e["message"] = message;
  if (!recipe.empty()) e["recipe"] = recipe;
  e["exit_code"] = code;
  std::cerr << e.dump() << '\n';
  return code;
}

void apply_override(rydcirc::RunConfig& cfg, const std::string& item) {
  const auto eq = item.find('=');
  const auto dot = item.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw rydcirc::ConfigError("override '" + item + "' must look like section.key=value");
  cfg.set(item.substr(0, dot), item.substr(dot + 1, eq - dot - 1), item.substr(eq + 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circular Rydberg state preparation: simulations and calibrations"};
  app.require_subcommand(0, 1);
  bool version = false;
  app.add_flag("--version", version, "print the version and the physical-constant hash");

  struct Args {
    std::string config;
    std::string output = ".";
    std::vector<std::string> overrides;
    unsigned workers = 1;
    bool print_config = false;
  };
  std::vector<std::pair<const rydcirc::Recipe*, CLI::App*>> subs;
  Args args;
  for (const auto& r : rydcirc::all_recipes()) {
    auto* sub = app.add_subcommand(r.name, r.description);
    sub->add_option("-c,--config", args.config, "INI config file (defaults apply when omitted)")->check(CLI::ExistingFile);
    sub->add_option("-o,--output", args.output, "output directory")->capture_default_str();
    sub->add_option("-s,--set", args.overrides, "override one key: section.key=value");
    sub->add_option("-w,--workers", args.workers, "worker threads for sweeps")->check(CLI::Range(1u, 256u))->capture_default_str();
    sub->add_flag("--print-config", args.print_config, "print the resolved config and exit");
    subs.emplace_back(&r, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(2, "usage", e.what(), "");
  }
  if (version) {
    std::cout << rydcirc::version_string() << '\n';
    return 0;
  }
  const rydcirc::Recipe* recipe = nullptr;
  for (const auto& [r, sub] : subs)
    if (sub->parsed()) recipe = r;
  if (!recipe) {
    std::cout << app.help();
    return 2;
  }

  try {
    auto cfg = args.config.empty() ? rydcirc::RunConfig(recipe->schema(), ".")
                                   : rydcirc::RunConfig::load(args.config, recipe->schema());
    for (const auto& o : args.overrides) apply_override(cfg, o);
    if (args.print_config) {
      std::cout << cfg.to_ini();
      return 0;
    }
    const auto summary = rydcirc::run_recipe(*recipe, cfg, args.output, args.workers);
    std::cout << summary.dump(2) << '\n';
    return 0;
  } catch (const rydcirc::ConfigError& e) {
    return fail(2, "config", e.what(), recipe->name);
  } catch (const rydcirc::InvalidArgument& e) {
    return fail(3, "invalid_argument", e.what(), recipe->name);
  } catch (const rydcirc::PropagationError& e) {
    return fail(4, "propagation", e.what(), recipe->name);
  } catch (const rydcirc::ConvergenceError& e) {
    return fail(4, "convergence", e.what(), recipe->name);
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what(), recipe->name);
  }
}
