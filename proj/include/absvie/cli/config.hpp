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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace absvie::cli {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridBlock {
  double horizon = 1.0;
  double anticipation = 0.0;
  std::size_t steps = 32;
};

struct McBlock {
  std::size_t paths = 10000;
  std::size_t dims = 1;
  std::uint64_t seed = 1;
};

struct BasisBlock {
  int degree = 3;
};

struct SolverBlock {
  double tol = 1e-8;
  std::size_t max_iter = 50;
  double damping = 0.5;
  std::optional<double> threshold;  // verdict threshold, subcommand default when absent
};

struct ExperimentConfig {
  std::string experiment;
  GridBlock grid;
  McBlock mc;
  BasisBlock basis;
  Json problem = Json::object();
  SolverBlock solver;
  std::string output_dir;
};

/// Command-line values that take precedence over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::size_t> steps;
  std::optional<std::string> out;
};

/// Known experiment kinds, in catalog order.
const std::vector<std::string>& experiment_kinds();

/// Validates the key tree (unknown keys are rejected) and fills the blocks.
ExperimentConfig parse_config(const Json& tree);
ExperimentConfig load_config(const std::string& path);

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

/// Effective configuration as a key tree, every block present.
Json to_json(const ExperimentConfig& config);

}  // namespace absvie::cli
