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

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "absvie/absvie_solve.hpp"
#include "absvie/game_lq.hpp"
#include "absvie/grid_paths.hpp"
#include "absvie/regularity.hpp"
#include "absvie/sdvie_sim.hpp"
#include "absvie/cli/config.hpp"

namespace absvie::cli {

struct ParamSpec {
  std::string name;
  double default_value = 0.0;
  std::string description;
};

struct BuiltinSpec {
  std::string kind;  // generator, free-term, kernels, game, regularity-case
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
};

/// Every builtin in a fixed order: by kind, then by registration.
const std::vector<BuiltinSpec>& catalog();

const BuiltinSpec& find_builtin(const std::string& kind, const std::string& name);

/// Parameter values of a selection {"name": ..., <param>: number, ...}, with
/// defaults filled in. Unknown or non-numeric parameters are rejected.
std::map<std::string, double> resolve_params(const std::string& kind, const Json& selection);

/// Human-readable catalog listing.
std::string describe_catalog();

GeneratorSpec make_generator(const Json& selection, const TimeGrid& grid);

/// Free term phi(p, node) on nodes 0..nodes of the ensemble grid.
struct FreeTermBuiltin {
  std::function<double(std::size_t path, std::size_t node)> phi;
  bool adapted = true;
};
FreeTermBuiltin make_free_term(const Json& selection, const PathEnsemble& ens);

LinearKernels make_kernels(const Json& selection);

LQGameSpec make_game(const Json& selection);

LinearRegularityCase make_regularity_case(const Json& selection);

}  // namespace absvie::cli
