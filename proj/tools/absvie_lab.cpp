/*
   Copyright 2026 The absvie-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "absvie/cli/builtins.hpp"
#include "absvie/cli/config.hpp"
#include "absvie/cli/experiments.hpp"
#include "absvie/parallel.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::size_t steps = 0;
  int threads = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "experiment configuration (JSON key tree)")->required();
  cmd->add_option("--out", f.out, "output directory for results.csv and manifest.json");
  cmd->add_option("--seed", f.seed, "ensemble seed (overrides mc.seed)");
  cmd->add_option("--paths", f.paths, "path count (overrides mc.paths)");
  cmd->add_option("--steps", f.steps, "steps in [0,T] (overrides grid.steps)");
  cmd->add_option("--threads", f.threads, "worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
}

int run(const std::string& experiment, const RunFlags& f, CLI::App* cmd) {
  using namespace absvie::cli;
  ExperimentConfig config;
  try {
    config = load_config(f.config);
    if (config.experiment != experiment) {
      throw ConfigError("config describes '" + config.experiment + "' but the subcommand is '" +
                        experiment + "'");
    }
    Overrides o;
    if (cmd->count("--seed")) o.seed = f.seed;
    if (cmd->count("--paths")) o.paths = f.paths;
    if (cmd->count("--steps")) o.steps = f.steps;
    if (cmd->count("--out")) o.out = f.out;
    apply_overrides(config, o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kError;
  }
  if (f.threads > 0) absvie::par::set_threads(f.threads);
  return run_and_write(config, stderr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"absvie-lab: Monte Carlo workbench for anticipated backward stochastic Volterra equations"};
  app.require_subcommand(1);
  RunFlags flags;
  std::string chosen;
  for (const auto& kind : absvie::cli::experiment_kinds()) {
    CLI::App* cmd = app.add_subcommand(kind, "run a " + kind + " experiment");
    add_run_flags(cmd, flags);
  }
  app.add_subcommand("list-builtins", "print the builtin generators, free terms, kernels and games");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : absvie::cli::kError;
  }
  CLI::App* cmd = app.get_subcommands().front();
  if (cmd->get_name() == "list-builtins") {
    std::fputs(absvie::cli::describe_catalog().c_str(), stdout);
    return 0;
  }
  try {
    return run(cmd->get_name(), flags, cmd);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return absvie::cli::kError;
  }
}
