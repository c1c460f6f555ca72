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

#pragma once

#include <cstdio>
#include <string>

#include "absvie/cli/config.hpp"
#include "absvie/cli/result_table.hpp"

namespace absvie::cli {

enum ExitCode : int { kPass = 0, kError = 1, kVerdictFail = 2 };

struct ExperimentResult {
  ResultTable table;
  Json diagnostics = Json::object();
  bool verdict = false;
  std::string summary;
};

/// Runs one experiment in process. Throws ConfigError for configuration
/// problems and propagates solver errors.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs the experiment and writes results.csv and manifest.json into
/// `config.output_dir`. Returns the exit code; diagnostics go to `log`.
int run_and_write(const ExperimentConfig& config, std::FILE* log);

/// Manifest key tree of a finished run.
Json make_manifest(const ExperimentConfig& config, const ExperimentResult& result,
                   double seconds, int exit_code);

}  // namespace absvie::cli
