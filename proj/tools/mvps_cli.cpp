// Copyright 2026 The MVPS Authors
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

// Command-line front end; talks to the library only through mvps.h.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvps/mvps.h"

int main(int argc, char** argv) {
  std::vector<std::string> names;
  for (size_t i = 0; i < mvps_subcommand_count(); ++i) {
    names.emplace_back(mvps_subcommand_name(i));
  }

  CLI::App app{"Measure-valued Polya sequences: simulation, exact checks, samplers"};
  app.set_version_flag("--version", std::string(mvps_version()));
  std::string subcommand;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> depth;

  app.add_option("subcommand", subcommand, "What to run")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--config", config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed (overrides task.seed)");
  app.add_option("--out", out,
                 "Output directory (overrides output.directory and $MVPS_OUT)");
  app.add_option("--tol", tol, "Tolerance for exact checks")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--replicates", replicates, "Number of replicates")
      ->check(CLI::PositiveNumber);
  app.add_option("--depth", depth, "Enumeration depth");
  app.footer("Exit status: 0 all checks passed, 1 a check failed, 2 invalid input.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  mvps_run_overrides o{};
  if (seed) {
    o.has_seed = 1;
    o.seed = *seed;
  }
  if (out) o.out = out->c_str();
  if (tol) {
    o.has_tol = 1;
    o.tol = *tol;
  }
  if (replicates) {
    o.has_replicates = 1;
    o.replicates = *replicates;
  }
  if (depth) {
    o.has_depth = 1;
    o.depth = *depth;
  }
  int exit_code = 2;
  mvps_run(subcommand.c_str(), config.c_str(), &o, &exit_code);
  return exit_code;
}
