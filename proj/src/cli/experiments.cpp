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

#include "absvie/cli/experiments.hpp"

#include <omp.h>

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>

#include "absvie/absvie_solve.hpp"
#include "absvie/cli/builtins.hpp"
#include "absvie/comparison.hpp"
#include "absvie/duality.hpp"
#include "absvie/game_lq.hpp"
#include "absvie/grid_paths.hpp"
#include "absvie/regress.hpp"
#include "absvie/regularity.hpp"
#include "absvie/sdvie_sim.hpp"

#ifndef ABSVIE_VERSION
#define ABSVIE_VERSION "0.0.0"
#endif

namespace absvie::cli {

namespace {

const Json& require_block(const Json& problem, const std::string& key) {
  if (!problem.contains(key)) throw ConfigError("problem." + key + " is required");
  return problem.at(key);
}

void reject_unknown(const Json& problem, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : problem.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in problem");
    }
  }
}

double problem_number(const Json& problem, const std::string& key, double fallback) {
  if (!problem.contains(key)) return fallback;
  if (!problem.at(key).is_number()) throw ConfigError("problem." + key + " must be a number");
  return problem.at(key).get<double>();
}

TimeGrid grid_of(const ExperimentConfig& c) {
  try {
    return make_grid(c.grid.horizon, c.grid.anticipation, c.grid.steps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Json diagnostics_json(const Diagnostics& d) {
  return Json{{"iterations", d.iterations},       {"converged", d.converged},
              {"distances", d.distances},         {"ratios", d.ratios},
              {"max_y_std_error", d.max_y_std_error}, {"max_z_std_error", d.max_z_std_error},
              {"message", d.message}};
}

double column_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double column_std_error(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = column_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

ExperimentResult solve_absvie_experiment(const ExperimentConfig& c) {
  reject_unknown(c.problem, {"generator", "free_term"});
  const TimeGrid g = grid_of(c);
  const GeneratorSpec spec = make_generator(require_block(c.problem, "generator"), g);
  const PathEnsemble ens = sample_paths(g, c.mc.paths, c.mc.dims, c.mc.seed);
  FreeTerm free;
  free.phi = make_free_term(require_block(c.problem, "free_term"), ens).phi;
  auto proj = std::make_shared<const Projector>(Basis(c.basis.degree), ens);
  const SolveResult r = solve_absvie(spec, free, proj, SolveOptions{c.solver.tol, c.solver.max_iter, nullptr});

  ExperimentResult out;
  const MSolution& s = r.solution;
  std::vector<double> col(ens.paths());
  for (std::size_t i = 0; i <= g.nodes; ++i) {
    const double t = g.time(static_cast<std::ptrdiff_t>(i));
    out.table.add(t, "Y", s.mean_y[i], i < g.steps ? s.y_std_error[i] : 0.0);
  }
  for (std::size_t i = 0; i < g.steps; ++i) {
    s.z.column(i, i, 0, col);
    out.table.add(g.time(static_cast<std::ptrdiff_t>(i)), "Z_diag", column_mean(col), s.z.std_error(i, i, 0));
  }
  const double residual = msolution_residual(s);
  const double threshold = c.solver.threshold.value_or(0.05);
  out.diagnostics = diagnostics_json(r.diagnostics);
  out.diagnostics["m_relation_residual"] = residual;
  out.diagnostics["threshold"] = threshold;
  out.verdict = r.diagnostics.converged && residual <= threshold;
  out.summary = "solve-absvie: " + std::to_string(r.diagnostics.iterations) + " iterations, residual " +
                std::to_string(residual);
  return out;
}

ExperimentResult comparison_experiment(const ExperimentConfig& c) {
  reject_unknown(c.problem, {"g1", "g2", "gbar", "phi1", "phi2", "y_min", "alpha_min", "mu_min"});
  const TimeGrid g = grid_of(c);
  const PathEnsemble ens = sample_paths(g, c.mc.paths, c.mc.dims, c.mc.seed);
  ComparisonCase cc;
  cc.g1 = make_generator(require_block(c.problem, "g1"), g);
  cc.g2 = make_generator(require_block(c.problem, "g2"), g);
  cc.gbar = make_generator(require_block(c.problem, "gbar"), g);
  cc.phi1.phi = make_free_term(require_block(c.problem, "phi1"), ens).phi;
  cc.phi2.phi = make_free_term(require_block(c.problem, "phi2"), ens).phi;
  cc.declared.y_min = problem_number(c.problem, "y_min", cc.declared.y_min);
  cc.declared.alpha_min = problem_number(c.problem, "alpha_min", cc.declared.alpha_min);
  cc.declared.mu_min = problem_number(c.problem, "mu_min", cc.declared.mu_min);
  auto proj = std::make_shared<const Projector>(Basis(c.basis.degree), ens);
  OrderingReport rep;
  try {
    rep = run_comparison(cc, proj, SolveOptions{c.solver.tol, c.solver.max_iter, nullptr});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ExperimentResult out;
  for (std::size_t i = 0; i <= g.steps; ++i) {
    const double t = g.time(static_cast<std::ptrdiff_t>(i));
    out.table.add(t, "margin_mean", rep.mean_margin[i], rep.epsilon[i] / 3.0);
    out.table.add(t, "margin_worst", rep.worst_margin[i]);
    out.table.add(t, "violation_fraction", rep.violation_fraction[i]);
  }
  const double threshold = c.solver.threshold.value_or(1e-3);
  out.diagnostics = Json{{"first", diagnostics_json(rep.first)},
                         {"second", diagnostics_json(rep.second)},
                         {"max_violation_fraction", rep.max_violation_fraction},
                         {"exact_violations", rep.exact_violations},
                         {"threshold", threshold}};
  out.verdict = rep.first.converged && rep.second.converged && rep.passed(threshold);
  out.summary = "check-comparison: max violation fraction " + std::to_string(rep.max_violation_fraction);
  return out;
}

ExperimentResult duality_experiment(const ExperimentConfig& c) {
  reject_unknown(c.problem, {"kernels", "delta", "phi_x", "phi_y", "bias_allowance"});
  const TimeGrid g = grid_of(c);
  const PathEnsemble ens = sample_paths(g, c.mc.paths, c.mc.dims, c.mc.seed);
  DualityCase dc;
  dc.kernels = make_kernels(require_block(c.problem, "kernels"));
  dc.delta = problem_number(c.problem, "delta", 0.0);
  const FreeTermBuiltin fx = make_free_term(require_block(c.problem, "phi_x"), ens);
  if (!fx.adapted) throw ConfigError("problem.phi_x must be an adapted free term");
  dc.phi_x = fx.phi;
  dc.phi_y = make_free_term(require_block(c.problem, "phi_y"), ens).phi;
  const double allowance = problem_number(c.problem, "bias_allowance", -1.0);
  auto proj = std::make_shared<const Projector>(Basis(c.basis.degree), ens);
  DualityReport rep;
  try {
    rep = check_duality(dc, proj, SolveOptions{c.solver.tol, c.solver.max_iter, nullptr}, allowance);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ExperimentResult out;
  out.table.add(0.0, "lhs", rep.lhs, rep.lhs_std_error);
  out.table.add(0.0, "rhs", rep.rhs, rep.rhs_std_error);
  out.table.add(0.0, "gap", rep.gap(), rep.pooled_std_error);
  for (std::size_t i = 0; i <= g.steps; ++i) {
    const double t = g.time(static_cast<std::ptrdiff_t>(i));
    const auto x = rep.x.column(static_cast<std::ptrdiff_t>(i));
    out.table.add(t, "X", column_mean(x), column_std_error(x));
    out.table.add(t, "Y", rep.y.mean_y[i], i < g.steps ? rep.y.y_std_error[i] : 0.0);
  }
  out.diagnostics = Json{{"backward", diagnostics_json(rep.backward)},
                         {"bias_allowance", rep.bias_allowance},
                         {"pooled_std_error", rep.pooled_std_error}};
  out.verdict = rep.verdict;
  out.summary = "check-duality: gap " + std::to_string(rep.gap()) + " (se " +
                std::to_string(rep.pooled_std_error) + ")";
  return out;
}

ExperimentResult simulate_experiment(const ExperimentConfig& c) {
  reject_unknown(c.problem, {"kernels", "delta", "phi"});
  const TimeGrid g = grid_of(c);
  const PathEnsemble ens = sample_paths(g, c.mc.paths, c.mc.dims, c.mc.seed);
  const LinearKernels k = make_kernels(require_block(c.problem, "kernels"));
  const FreeTermBuiltin f = make_free_term(require_block(c.problem, "phi"), ens);
  if (!f.adapted) throw ConfigError("problem.phi must be an adapted free term");
  std::size_t d = 0;
  try {
    d = delay_steps(g, problem_number(c.problem, "delta", 0.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  HistorySpec hist;
  hist.phi = [phi = f.phi](std::size_t p, std::ptrdiff_t node) {
    return node < 0 ? 0.0 : phi(p, static_cast<std::size_t>(node));
  };
  const StatePath x = simulate_linear(k, hist, d, ens);
  ExperimentResult out;
  bool finite = true;
  std::vector<double> sq(ens.paths());
  for (std::size_t i = 0; i <= g.steps; ++i) {
    const double t = g.time(static_cast<std::ptrdiff_t>(i));
    const auto col = x.column(static_cast<std::ptrdiff_t>(i));
    for (std::size_t p = 0; p < col.size(); ++p) {
      finite = finite && std::isfinite(col[p]);
      sq[p] = col[p] * col[p];
    }
    out.table.add(t, "X", column_mean(col), column_std_error(col));
    out.table.add(t, "X2", column_mean(sq), column_std_error(sq));
  }
  out.diagnostics = Json{{"kernel_sup_norm", k.sup_norm(g)}, {"finite", finite}};
  out.verdict = finite;
  out.summary = "simulate-sdvie: " + std::to_string(g.steps + 1) + " nodes";
  return out;
}

ExperimentResult game_experiment(const ExperimentConfig& c) {
  reject_unknown(c.problem, {"game", "perturbation", "epsilons"});
  const TimeGrid g = grid_of(c);
  const LQGameSpec spec = make_game(require_block(c.problem, "game"));
  try {
    spec.validate(g);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  bool perturb = true;
  if (c.problem.contains("perturbation")) {
    if (!c.problem.at("perturbation").is_boolean()) throw ConfigError("problem.perturbation must be a boolean");
    perturb = c.problem.at("perturbation").get<bool>();
  }
  std::vector<double> eps{0.05, 0.1, 0.2};
  if (c.problem.contains("epsilons")) {
    const Json& e = c.problem.at("epsilons");
    if (!e.is_array() || e.empty()) throw ConfigError("problem.epsilons must be a nonempty array");
    eps.clear();
    for (const auto& v : e) {
      if (!v.is_number()) throw ConfigError("problem.epsilons must hold numbers");
      eps.push_back(v.get<double>());
    }
  }
  const PathEnsemble ens = sample_paths(g, c.mc.paths, c.mc.dims, c.mc.seed);
  NashOptions opt;
  opt.degree = c.basis.degree;
  opt.damping = c.solver.damping;
  opt.tol = c.solver.tol;
  opt.max_iter = c.solver.max_iter;
  const NashResult r = solve_nash(spec, ens, opt);
  const StationarityReport st = stationarity_residual(spec, g, r.iterate, r.adjoints);

  ExperimentResult out;
  for (std::size_t k = 0; k <= g.steps; ++k) {
    const auto node = static_cast<std::ptrdiff_t>(k);
    const double t = g.time(node);
    const auto x = r.state.column(node);
    out.table.add(t, "X", column_mean(x), column_std_error(x));
    for (std::size_t i = 0; i < 2; ++i) {
      const auto u = r.iterate.u[i].column(node);
      out.table.add(t, "u" + std::to_string(i + 1), column_mean(u), column_std_error(u));
    }
    if (k < g.steps) {
      out.table.add(t, "stationarity1", st.residual[0][k]);
      out.table.add(t, "stationarity2", st.residual[1][k]);
    }
  }
  const Estimate j1 = game_cost(spec, 0, r.state, r.iterate.u, g);
  const Estimate j2 = game_cost(spec, 1, r.state, r.iterate.u, g);
  out.table.add(0.0, "J1", j1.value, j1.std_error);
  out.table.add(0.0, "J2", j2.value, j2.std_error);

  const double threshold = c.solver.threshold.value_or(1e-3);
  bool stationary = true;
  for (std::size_t i = 0; i < 2; ++i) {
    stationary = stationary && st.max_residual[i] <= std::max(threshold, 3.0 * st.max_std_error[i]);
  }
  bool optimal = true;
  Json perturbations = Json::array();
  if (perturb) {
    std::vector<ControlPath> dirs(3, ControlPath(0, g.steps, ens.paths()));
    for (std::size_t k = 0; k <= g.steps; ++k) {
      const auto node = static_cast<std::ptrdiff_t>(k);
      for (std::size_t p = 0; p < ens.paths(); ++p) {
        dirs[0].at(p, node) = 1.0;
        dirs[1].at(p, node) = g.time(node);
        dirs[2].at(p, node) = ens.brownian(p, k, 0);
      }
    }
    for (const auto& row : perturbation_check(spec, r, dirs, eps, ens)) {
      const std::string q = "dJ" + std::to_string(row.player + 1) + "_dir" + std::to_string(row.direction);
      out.table.add(row.epsilon, q, row.delta_j, row.std_error);
      optimal = optimal && row.delta_j >= -3.0 * row.std_error;
      perturbations.push_back({{"player", row.player + 1}, {"direction", row.direction},
                               {"epsilon", row.epsilon}, {"delta_j", row.delta_j},
                               {"std_error", row.std_error}});
    }
  }
  out.diagnostics = Json{{"iterations", r.diagnostics.iterations},
                         {"converged", r.diagnostics.converged},
                         {"distances", r.diagnostics.distances},
                         {"cost1", r.diagnostics.cost1},
                         {"cost2", r.diagnostics.cost2},
                         {"final_cycle_distance", r.diagnostics.final_cycle_distance},
                         {"stationarity", {st.max_residual[0], st.max_residual[1]}},
                         {"stationarity_std_error", {st.max_std_error[0], st.max_std_error[1]}},
                         {"perturbations", perturbations},
                         {"message", r.diagnostics.message}};
  out.verdict = r.diagnostics.converged && stationary && optimal;
  out.summary = "solve-game: " + std::to_string(r.diagnostics.iterations) + " Nash iterations";
  return out;
}

ExperimentResult regularity_experiment(const ExperimentConfig& c) {
  reject_unknown(c.problem, {"case", "r_nodes"});
  const TimeGrid g = grid_of(c);
  const LinearRegularityCase rc = make_regularity_case(require_block(c.problem, "case"));
  std::vector<std::size_t> rs;
  if (c.problem.contains("r_nodes")) {
    const Json& v = c.problem.at("r_nodes");
    if (!v.is_array() || v.empty()) throw ConfigError("problem.r_nodes must be a nonempty array");
    for (const auto& r : v) {
      if (!r.is_number_unsigned() || r.get<std::size_t>() >= g.steps) {
        throw ConfigError("problem.r_nodes entries must be node indices below steps");
      }
      rs.push_back(r.get<std::size_t>());
    }
  } else {
    for (std::size_t k = 0; k < 7; ++k) rs.push_back(k * g.steps / 8);
  }
  const PathEnsemble ens = sample_paths(g, c.mc.paths, c.mc.dims, c.mc.seed);
  const SolveOptions opt{c.solver.tol, c.solver.max_iter, nullptr};
  auto proj = regularity_projector(rc, ens, c.basis.degree);
  const SolveResult base = solve_base(rc, proj, opt);
  const double threshold = c.solver.threshold.value_or(0.1);
  ExperimentResult out;
  bool converged = base.diagnostics.converged;
  double worst = 0.0;
  Json per_r = Json::array();
  for (std::size_t r : rs) {
    const SolveResult der = solve_derivative(rc, r, proj, opt);
    converged = converged && der.diagnostics.converged;
    const RepresentationReport rep = check_representation(base.solution, der.solution, r);
    const std::string tag = "_r" + std::to_string(r);
    for (std::size_t i = r + 1; i <= g.steps; ++i) {
      const double t = g.time(static_cast<std::ptrdiff_t>(i));
      out.table.add(t, "Z" + tag, rep.z[i - r - 1]);
      out.table.add(t, "DY" + tag, rep.dy[i - r - 1]);
      out.table.add(t, "error" + tag, rep.error[i - r - 1]);
    }
    worst = std::max(worst, rep.max_error);
    per_r.push_back({{"r", r}, {"max_error", rep.max_error}, {"mean_error", rep.mean_error},
                     {"iterations", der.diagnostics.iterations}});
  }
  out.diagnostics = Json{{"base", diagnostics_json(base.diagnostics)},
                         {"representation", per_r},
                         {"max_error", worst},
                         {"threshold", threshold}};
  out.verdict = converged && worst <= threshold;
  out.summary = "check-regularity: max representation error " + std::to_string(worst);
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::string& e = config.experiment;
  if (e == "solve-absvie") return solve_absvie_experiment(config);
  if (e == "check-comparison") return comparison_experiment(config);
  if (e == "check-duality") return duality_experiment(config);
  if (e == "simulate-sdvie") return simulate_experiment(config);
  if (e == "solve-game") return game_experiment(config);
  if (e == "check-regularity") return regularity_experiment(config);
  throw ConfigError("unknown experiment kind '" + e + "'");
}

Json make_manifest(const ExperimentConfig& config, const ExperimentResult& result, double seconds,
                   int exit_code) {
  const Json cfg = to_json(config);
  return Json{{"config", cfg},
              {"config_sha1", sha1_hex(cfg.dump())},
              {"seed", config.mc.seed},
              {"versions",
               {{"absvie_lab", ABSVIE_VERSION},
                {"compiler", __VERSION__},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                              "." + std::to_string(EIGEN_MINOR_VERSION)},
                {"openmp", _OPENMP}}},
              {"durations", {{"total_seconds", seconds}, {"threads", omp_get_max_threads()}}},
              {"diagnostics", result.diagnostics},
              {"verdict", result.verdict ? "pass" : "fail"},
              {"exit_code", exit_code}};
}

int run_and_write(const ExperimentConfig& config, std::FILE* log) {
  if (config.output_dir.empty()) {
    std::fprintf(log, "error: no output directory (use --out or output.dir)\n");
    return kError;
  }
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  try {
    result = run_experiment(config);
  } catch (const ConfigError& e) {
    std::fprintf(log, "configuration error: %s\n", e.what());
    return kError;
  } catch (const std::exception& e) {
    std::fprintf(log, "solver error: %s\n", e.what());
    return kError;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const int code = result.verdict ? kPass : kVerdictFail;
  try {
    std::filesystem::create_directories(config.output_dir);
    const std::filesystem::path dir(config.output_dir);
    result.table.write_csv((dir / "results.csv").string());
    write_text((dir / "manifest.json").string(), make_manifest(config, result, seconds, code).dump(2) + "\n");
  } catch (const std::exception& e) {
    std::fprintf(log, "output error: %s\n", e.what());
    return kError;
  }
  std::fprintf(log, "%s -> %s (%.2f s)\n", result.summary.c_str(), result.verdict ? "pass" : "fail", seconds);
  return code;
}

}  // namespace absvie::cli
