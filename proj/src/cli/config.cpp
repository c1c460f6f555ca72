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

#include "absvie/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace absvie::cli {

namespace {

void reject_unknown(const Json& block, const std::string& where, const std::set<std::string>& allowed) {
  if (!block.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : block.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const Json& block, const std::string& key, const std::string& where, double fallback) {
  if (!block.contains(key)) return fallback;
  const Json& v = block.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key + " must be finite");
  return x;
}

std::size_t count(const Json& block, const std::string& key, const std::string& where,
                  std::size_t fallback) {
  if (!block.contains(key)) return fallback;
  const Json& v = block.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError(where + "." + key + " must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"solve-absvie",     "check-duality",
                                              "check-comparison", "solve-game",
                                              "check-regularity", "simulate-sdvie"};
  return kinds;
}

ExperimentConfig parse_config(const Json& tree) {
  reject_unknown(tree, "config", {"experiment", "grid", "mc", "basis", "problem", "solver", "output"});
  ExperimentConfig c;
  if (!tree.contains("experiment") || !tree.at("experiment").is_string()) {
    throw ConfigError("config.experiment must name the experiment kind");
  }
  c.experiment = tree.at("experiment").get<std::string>();
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.experiment) == kinds.end()) {
    throw ConfigError("unknown experiment kind '" + c.experiment + "'");
  }

  const Json empty = Json::object();
  const Json& grid = tree.contains("grid") ? tree.at("grid") : empty;
  reject_unknown(grid, "grid", {"T", "K", "steps"});
  c.grid.horizon = number(grid, "T", "grid", c.grid.horizon);
  c.grid.anticipation = number(grid, "K", "grid", c.grid.anticipation);
  c.grid.steps = count(grid, "steps", "grid", c.grid.steps);

  const Json& mc = tree.contains("mc") ? tree.at("mc") : empty;
  reject_unknown(mc, "mc", {"paths", "dims", "seed"});
  c.mc.paths = count(mc, "paths", "mc", c.mc.paths);
  c.mc.dims = count(mc, "dims", "mc", c.mc.dims);
  c.mc.seed = count(mc, "seed", "mc", c.mc.seed);
  if (c.mc.paths == 0) throw ConfigError("mc.paths must be positive");
  if (c.mc.dims == 0) throw ConfigError("mc.dims must be positive");

  const Json& basis = tree.contains("basis") ? tree.at("basis") : empty;
  reject_unknown(basis, "basis", {"degree"});
  c.basis.degree = static_cast<int>(count(basis, "degree", "basis", static_cast<std::size_t>(c.basis.degree)));
  if (c.basis.degree < 1 || c.basis.degree > 4) throw ConfigError("basis.degree must lie in 1..4");

  if (tree.contains("problem")) {
    if (!tree.at("problem").is_object()) throw ConfigError("problem must be an object");
    c.problem = tree.at("problem");
  }

  const Json& solver = tree.contains("solver") ? tree.at("solver") : empty;
  reject_unknown(solver, "solver", {"tol", "max_iter", "damping", "threshold"});
  c.solver.tol = number(solver, "tol", "solver", c.solver.tol);
  c.solver.max_iter = count(solver, "max_iter", "solver", c.solver.max_iter);
  c.solver.damping = number(solver, "damping", "solver", c.solver.damping);
  if (solver.contains("threshold")) c.solver.threshold = number(solver, "threshold", "solver", 0.0);
  if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
  if (c.solver.max_iter == 0) throw ConfigError("solver.max_iter must be positive");
  if (!(c.solver.damping > 0.0 && c.solver.damping <= 1.0)) {
    throw ConfigError("solver.damping must lie in (0, 1]");
  }

  const Json& output = tree.contains("output") ? tree.at("output") : empty;
  reject_unknown(output, "output", {"dir"});
  if (output.contains("dir")) {
    if (!output.at("dir").is_string()) throw ConfigError("output.dir must be a string");
    c.output_dir = output.at("dir").get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json tree;
  try {
    tree = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(tree);
}

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) config.mc.seed = *o.seed;
  if (o.paths) {
    if (*o.paths == 0) throw ConfigError("--paths must be positive");
    config.mc.paths = *o.paths;
  }
  if (o.steps) {
    if (*o.steps == 0) throw ConfigError("--steps must be positive");
    config.grid.steps = *o.steps;
  }
  if (o.out) config.output_dir = *o.out;
}

Json to_json(const ExperimentConfig& c) {
  Json solver{{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}, {"damping", c.solver.damping}};
  if (c.solver.threshold) solver["threshold"] = *c.solver.threshold;
  return Json{{"experiment", c.experiment},
              {"grid", {{"T", c.grid.horizon}, {"K", c.grid.anticipation}, {"steps", c.grid.steps}}},
              {"mc", {{"paths", c.mc.paths}, {"dims", c.mc.dims}, {"seed", c.mc.seed}}},
              {"basis", {{"degree", c.basis.degree}}},
              {"problem", c.problem},
              {"solver", solver},
              {"output", {{"dir", c.output_dir}}}};
}

}  // namespace absvie::cli
