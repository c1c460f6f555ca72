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

#include "absvie/game_lq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "absvie/parallel.hpp"

namespace absvie {

namespace {

double eval(const Kernel& k, double t, double s) { return k ? k(t, s) : 0.0; }
double eval(const TimeFn& f, double t) { return f ? f(t) : 0.0; }

const ControlPath& own(const std::array<ControlPath, 2>& u, std::size_t player) { return u[player]; }

}  // namespace

GameDelays game_delays(const LQGameSpec& spec, const TimeGrid& grid) {
  GameDelays d;
  d.state = delay_steps(grid, spec.delta);
  for (std::size_t i = 0; i < 2; ++i) d.control[i] = delay_steps(grid, spec.players[i].delay);
  return d;
}

void LQGameSpec::validate(const TimeGrid& grid) const {
  const GameDelays d = game_delays(*this, grid);
  const std::size_t reach = std::max({d.state, d.control[0], d.control[1]});
  if (reach > grid.anticipation_steps()) {
    throw std::invalid_argument("game: delays must not exceed the anticipation span K");
  }
  if (!phi) throw std::invalid_argument("game: free term phi is required");
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k <= grid.steps; ++k) {
      const double w = control_weight(*this, i, k, grid);
      if (!(w > 0.0)) {
        throw std::invalid_argument("game: r + rt(. + delta) must be positive for player " +
                                    std::to_string(i + 1) + " at node " + std::to_string(k));
      }
    }
  }
}

LQGameSpec LQGameSpec::swapped() const {
  LQGameSpec s = *this;
  std::swap(s.players[0], s.players[1]);
  return s;
}

double control_weight(const LQGameSpec& spec, std::size_t player, std::size_t node,
                      const TimeGrid& grid) {
  const PlayerSpec& pl = spec.players[player];
  const std::size_t d = delay_steps(grid, pl.delay);
  const double t = grid.time(static_cast<std::ptrdiff_t>(node));
  double w = eval(pl.r, t);
  if (node + d <= grid.steps) w += eval(pl.rt, grid.time(static_cast<std::ptrdiff_t>(node + d)));
  return w;
}

std::array<ControlPath, 2> zero_controls(const LQGameSpec& spec, const PathEnsemble& ens) {
  const TimeGrid& grid = ens.grid();
  const GameDelays d = game_delays(spec, grid);
  std::array<ControlPath, 2> u;
  for (std::size_t i = 0; i < 2; ++i) {
    u[i] = ControlPath(d.control[i], grid.steps, ens.paths());
    const auto& hist = spec.players[i].history;
    if (!hist) continue;
    for (std::ptrdiff_t k = -static_cast<std::ptrdiff_t>(d.control[i]); k < 0; ++k) {
      for (std::size_t p = 0; p < ens.paths(); ++p) u[i].at(p, k) = hist(p, k);
    }
  }
  return u;
}

StatePath simulate_game(const LQGameSpec& spec, const std::array<ControlPath, 2>& u,
                        const PathEnsemble& ens) {
  const GameDelays d = game_delays(spec, ens.grid());
  const PlayerSpec& p1 = spec.players[0];
  const PlayerSpec& p2 = spec.players[1];
  SDVIECoeffs coeffs;
  coeffs.drift = [&](const TimePair& tp, const StateArgs& a) {
    const double x_part = eval(spec.a1, tp.t, tp.s) * a.x + eval(spec.a2, tp.t, tp.s) * a.x_delay;
    const double c1 = eval(p1.b, tp.t, tp.s) * a.u1 + eval(p1.c, tp.t, tp.s) * a.u1_delay;
    const double c2 = eval(p2.b, tp.t, tp.s) * a.u2 + eval(p2.c, tp.t, tp.s) * a.u2_delay;
    return x_part + (c1 + c2);
  };
  coeffs.diffusion = [&](const TimePair& tp, double x, double u1, double u2) {
    return eval(spec.at1, tp.t, tp.s) * x +
           (eval(p1.bt, tp.t, tp.s) * u1 + eval(p2.bt, tp.t, tp.s) * u2);
  };
  HistorySpec history{spec.phi};
  return simulate_sdvie(coeffs, history, u[0], u[1],
                        SDVIEDelays{d.state, d.control[0], d.control[1]}, ens);
}

Estimate game_cost(const LQGameSpec& spec, std::size_t player, const StatePath& x,
                   const std::array<ControlPath, 2>& u, const TimeGrid& grid) {
  const GameDelays d = game_delays(spec, grid);
  const PlayerSpec& pl = spec.players[player];
  const CostFn cost = [&](std::size_t, double t, const StateArgs& a) {
    const double ui = player == 0 ? a.u1 : a.u2;
    const double uid = player == 0 ? a.u1_delay : a.u2_delay;
    return 0.5 * (eval(pl.q, t) * a.x * a.x + eval(pl.qt, t) * a.x_delay * a.x_delay +
                  eval(pl.r, t) * ui * ui + eval(pl.rt, t) * uid * uid);
  };
  return performance(cost, x, u[0], u[1], SDVIEDelays{d.state, d.control[0], d.control[1]}, grid);
}

std::shared_ptr<const Projector> game_projector(const StatePath& x, const PathEnsemble& ens,
                                                int degree) {
  Basis basis(degree);
  basis.add_state("X", [&x](std::size_t p, std::size_t node) {
    return x.at(p, static_cast<std::ptrdiff_t>(node));
  });
  return std::make_shared<const Projector>(basis, ens);
}

GeneratorSpec adjoint_generator(const LQGameSpec& spec, const TimeGrid& grid) {
  GeneratorSpec g;
  g.name = "lq-adjoint";
  const std::size_t d = delay_steps(grid, spec.delta);
  g.delays.delta = d;
  g.uses.y = static_cast<bool>(spec.a1);
  g.uses.alpha = static_cast<bool>(spec.a2);
  g.uses.xi = static_cast<bool>(spec.at1);
  const std::size_t steps = grid.steps;
  const double h = grid.step;
  const Kernel a1 = spec.a1, a2 = spec.a2, at1 = spec.at1;
  g.g = [a1, a2, at1, d, steps, h](const GeneratorArgs& a) {
    if (a.j == a.i) return 0.0;
    double v = 0.0;
    if (a1) v += a1(a.s, a.t) * a.y;
    if (a2 && a.j + d <= steps) {
      v += a2(static_cast<double>(a.j + d) * h, static_cast<double>(a.i + d) * h) * a.alpha;
    }
    if (at1) v += at1(a.s, a.t) * a.xi[0];
    return v;
  };
  return g;
}

AdjointSolution solve_adjoint(const LQGameSpec& spec, const StatePath& x, std::size_t player,
                              std::shared_ptr<const Projector> projector,
                              const SolveOptions& options) {
  const TimeGrid& grid = projector->grid();
  const std::size_t n = grid.steps;
  const std::size_t paths = projector->paths();
  const double h = grid.step;
  const GameDelays d = game_delays(spec, grid);
  const PlayerSpec& pl = spec.players[player];

  std::vector<double> weight(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    weight[k] = eval(pl.q, grid.time(static_cast<std::ptrdiff_t>(k)));
    if (k + d.state <= n) weight[k] += eval(pl.qt, grid.time(static_cast<std::ptrdiff_t>(k + d.state)));
  }
  FreeTerm free;
  free.phi = [&](std::size_t p, std::size_t k) {
    return k < n ? weight[k] * x.at(p, static_cast<std::ptrdiff_t>(k)) : 0.0;
  };

  AdjointSolution out;
  SolveResult res = solve_absvie(adjoint_generator(spec, grid), free, projector, options);
  out.y = std::move(res.solution);
  out.diagnostics = std::move(res.diagnostics);

  const std::size_t di = d.control[player];
  out.y0.assign((n + 1) * paths, 0.0);
  out.y0_raw.assign(n * paths, 0.0);
  out.y0_std_error.assign(n, 0.0);
  std::vector<double> zc(paths);
  for (std::size_t k = 0; k < n; ++k) {
    std::span<double> s(out.y0_raw.data() + k * paths, paths);
    const double tk = grid.time(static_cast<std::ptrdiff_t>(k));
    for (std::size_t j = k + 1; j < n; ++j) {
      const double tj = grid.time(static_cast<std::ptrdiff_t>(j));
      const double bj = eval(pl.b, tj, tk);
      const double cj = j + di <= n ? eval(pl.c, grid.time(static_cast<std::ptrdiff_t>(j + di)),
                                           grid.time(static_cast<std::ptrdiff_t>(k + di)))
                                    : 0.0;
      const double btj = eval(pl.bt, tj, tk);
      if (btj != 0.0) out.y.z.column(j, k, 0, zc);
      const auto yj = out.y.y_column(j);
      const auto yjd = out.y.y_column(j + di);
      par::for_blocks(paths, [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
          double v = bj * yj[p] + cj * yjd[p];
          if (btj != 0.0) v += btj * zc[p];
          s[p] += h * v;
        }
      });
    }
    const Projection f = projector->fit(s, k);
    out.y0_std_error[k] = f.std_error;
    projector->design(k).predict(f.coefficients,
                                 std::span<double>(out.y0.data() + k * paths, paths));
  }
  return out;
}

std::vector<double> adjoint_z0(const AdjointSolution& adj, std::size_t k, std::size_t j) {
  const TimeGrid& grid = adj.y.grid();
  if (k >= grid.steps || j < k || j >= grid.steps) {
    throw std::out_of_range("adjoint_z0: need k <= j < steps");
  }
  const std::size_t paths = adj.y.paths();
  return adj.y.projector->martingale_coeff(
      std::span<const double>(adj.y0_raw.data() + k * paths, paths), j, 0);
}

std::array<ControlPath, 2> nash_update(const LQGameSpec& spec, const TimeGrid& grid,
                                       const std::array<AdjointSolution, 2>& adjoints,
                                       const std::array<ControlPath, 2>& current) {
  std::array<ControlPath, 2> next = current;
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t paths = current[i].paths();
    for (std::size_t k = 0; k <= grid.steps; ++k) {
      const double w = control_weight(spec, i, k, grid);
      if (!(w > 0.0)) {
        throw std::invalid_argument("nash_update: r + rt(. + delta) vanishes at node " +
                                    std::to_string(k));
      }
      const auto y0 = adjoints[i].y0_column(k);
      auto u = next[i].column(static_cast<std::ptrdiff_t>(k));
      for (std::size_t p = 0; p < paths; ++p) u[p] = 0.0 - y0[p] / w;
    }
  }
  return next;
}

double control_distance(const std::array<ControlPath, 2>& a, const std::array<ControlPath, 2>& b,
                        const TimeGrid& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < grid.steps; ++k) {
      const auto ua = a[i].column(static_cast<std::ptrdiff_t>(k));
      const auto ub = b[i].column(static_cast<std::ptrdiff_t>(k));
      s += par::block_reduce(ua.size(), 1, [&](std::size_t lo, std::size_t hi, std::span<double> r) {
        double v = 0.0;
        for (std::size_t p = lo; p < hi; ++p) v += (ua[p] - ub[p]) * (ua[p] - ub[p]);
        r[0] += v;
      })[0] / static_cast<double>(ua.size());
    }
  }
  return std::sqrt(grid.step * s);
}

NashResult solve_nash(const LQGameSpec& spec, const PathEnsemble& ens, const NashOptions& options) {
  const TimeGrid& grid = ens.grid();
  spec.validate(grid);
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw std::invalid_argument("solve_nash: damping must lie in (0, 1]");
  }
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_nash: tol must be positive");
  const double rho = options.damping;

  NashResult res;
  NashDiagnostics& diag = res.diagnostics;
  std::array<ControlPath, 2> u = zero_controls(spec, ens);
  std::array<std::unique_ptr<MSolution>, 2> warm;

  auto evaluate = [&](const std::array<ControlPath, 2>& controls, StatePath& x,
                      std::shared_ptr<const Projector>& proj, std::array<AdjointSolution, 2>& adj) {
    x = simulate_game(spec, controls, ens);
    proj = game_projector(x, ens, options.degree);
    for (std::size_t i = 0; i < 2; ++i) {
      SolveOptions so = options.adjoint;
      so.initial = warm[i].get();
      adj[i] = solve_adjoint(spec, x, i, proj, so);
      warm[i] = std::make_unique<MSolution>(adj[i].y);
    }
  };

  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    StatePath x;
    std::shared_ptr<const Projector> proj;
    std::array<AdjointSolution, 2> adj;
    evaluate(u, x, proj, adj);
    diag.cost1.push_back(game_cost(spec, 0, x, u, grid).value);
    diag.cost2.push_back(game_cost(spec, 1, x, u, grid).value);
    const auto candidate = nash_update(spec, grid, adj, u);
    std::array<ControlPath, 2> next = u;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k <= grid.steps; ++k) {
        const auto c = candidate[i].column(static_cast<std::ptrdiff_t>(k));
        auto v = next[i].column(static_cast<std::ptrdiff_t>(k));
        for (std::size_t p = 0; p < v.size(); ++p) v[p] = (1.0 - rho) * v[p] + rho * c[p];
      }
    }
    const double dist = control_distance(next, u, grid);
    diag.distances.push_back(dist);
    diag.iterations = it;
    u = std::move(next);
    if (dist < options.tol) {
      diag.converged = true;
      break;
    }
  }
  if (!diag.converged) {
    diag.message = "no convergence after " + std::to_string(options.max_iter) +
                   " iterations; try a smaller damping or weaker coupling kernels";
  }

  evaluate(u, res.state, res.projector, res.adjoints);
  diag.final_cycle_distance = control_distance(nash_update(spec, grid, res.adjoints, u), u, grid);
  res.iterate.u = std::move(u);
  res.iterate.iteration = diag.iterations;
  res.iterate.distance = diag.distances.empty() ? 0.0 : diag.distances.back();
  return res;
}

StationarityReport stationarity_residual(const LQGameSpec& spec, const TimeGrid& grid,
                                         const NashIterate& iterate,
                                         const std::array<AdjointSolution, 2>& adjoints) {
  StationarityReport rep;
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<double> raw(grid.steps, 0.0);
    double scale = 0.0;
    for (std::size_t k = 0; k < grid.steps; ++k) {
      const double w = control_weight(spec, i, k, grid);
      const auto y0 = adjoints[i].y0_column(k);
      const auto u = own(iterate.u, i).column(static_cast<std::ptrdiff_t>(k));
      const auto acc = par::block_reduce(y0.size(), 3, [&](std::size_t b, std::size_t e, std::span<double> a) {
        for (std::size_t p = b; p < e; ++p) {
          const double r = y0[p] + w * u[p];
          a[0] += r * r;
          a[1] += y0[p] * y0[p];
          a[2] += u[p] * u[p];
        }
      });
      const double n = static_cast<double>(y0.size());
      raw[k] = std::sqrt(acc[0] / n);
      scale = std::max(scale, std::sqrt(acc[1] / n) + w * std::sqrt(acc[2] / n));
    }
    rep.residual[i].assign(grid.steps, 0.0);
    for (std::size_t k = 0; k < grid.steps; ++k) {
      rep.residual[i][k] = scale > 0.0 ? raw[k] / scale : raw[k];
      rep.max_residual[i] = std::max(rep.max_residual[i], rep.residual[i][k]);
      const double se = adjoints[i].y0_std_error[k];
      rep.max_std_error[i] = std::max(rep.max_std_error[i], scale > 0.0 ? se / scale : se);
    }
  }
  return rep;
}

std::vector<PerturbationRow> perturbation_check(const LQGameSpec& spec, const NashResult& result,
                                                const std::vector<ControlPath>& directions,
                                                const std::vector<double>& epsilons,
                                                const PathEnsemble& ens) {
  const TimeGrid& grid = ens.grid();
  std::vector<PerturbationRow> rows;
  for (std::size_t i = 0; i < 2; ++i) {
    const Estimate base = game_cost(spec, i, result.state, result.iterate.u, grid);
    for (std::size_t v = 0; v < directions.size(); ++v) {
      const ControlPath& dir = directions[v];
      if (dir.paths() != ens.paths() || dir.steps() != grid.steps) {
        throw std::invalid_argument("perturbation_check: direction does not match the ensemble");
      }
      for (double eps : epsilons) {
        std::array<ControlPath, 2> u = result.iterate.u;
        for (std::size_t k = 0; k <= grid.steps; ++k) {
          const auto dv = dir.column(static_cast<std::ptrdiff_t>(k));
          auto col = u[i].column(static_cast<std::ptrdiff_t>(k));
          for (std::size_t p = 0; p < col.size(); ++p) col[p] += eps * dv[p];
        }
        const StatePath x = simulate_game(spec, u, ens);
        const Estimate j = game_cost(spec, i, x, u, grid);
        std::vector<double> diff(j.per_path.size());
        for (std::size_t p = 0; p < diff.size(); ++p) diff[p] = j.per_path[p] - base.per_path[p];
        const Estimate d = summarize(std::move(diff));
        rows.push_back({i, v, eps, d.value, d.std_error});
      }
    }
  }
  return rows;
}

std::vector<double> hamiltonian(const LQGameSpec& spec, const TimeGrid& grid,
                                const NashIterate& iterate, const AdjointSolution& adjoint,
                                std::size_t player, std::size_t node, double u) {
  const double w = control_weight(spec, player, node, grid);
  const auto y0 = adjoint.y0_column(node);
  const auto us = iterate.u[player].column(static_cast<std::ptrdiff_t>(node));
  std::vector<double> out(y0.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = -(y0[p] + w * us[p]) * u;
  return out;
}

}  // namespace absvie
