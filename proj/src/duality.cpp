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

#include "absvie/duality.hpp"

#include <cmath>
#include <stdexcept>

#include "absvie/parallel.hpp"

namespace absvie {

GeneratorSpec dual_generator(const LinearKernels& kernels, const TimeGrid& grid,
                             std::size_t delay) {
  GeneratorSpec spec;
  spec.name = "dual-linear";
  spec.delays.delta = delay;
  spec.uses.y = static_cast<bool>(kernels.a1);
  spec.uses.alpha = static_cast<bool>(kernels.a2);
  spec.uses.xi = static_cast<bool>(kernels.a3);
  const std::size_t steps = grid.steps;
  const double shift = grid.time(static_cast<std::ptrdiff_t>(delay));
  spec.g = [kernels, steps, delay, shift](const GeneratorArgs& a) {
    double v = 0.0;
    if (a.j > a.i) {
      if (kernels.a1) v += kernels.a1(a.s, a.t) * a.y;
      if (kernels.a2 && a.j + delay <= steps) v += kernels.a2(a.s + shift, a.t + shift) * a.alpha;
    }
    if (kernels.a3) v += kernels.a3(a.s, a.t) * a.xi[0];
    return v;
  };
  return spec;
}

DualityReport check_duality(const DualityCase& c, std::shared_ptr<const Projector> projector,
                            const SolveOptions& options, double bias_allowance) {
  const PathEnsemble& ens = projector->ensemble();
  const TimeGrid& grid = ens.grid();
  if (!c.phi_x || !c.phi_y) throw std::invalid_argument("duality: both free terms are required");
  const std::size_t d = delay_steps(grid, c.delta);
  if (d > grid.anticipation_steps()) {
    throw std::invalid_argument("duality: the grid's anticipation span must cover the delay");
  }
  const std::size_t paths = ens.paths();
  const std::size_t n = grid.steps;
  const double h = grid.step;

  HistorySpec history;
  history.phi = [&](std::size_t p, std::ptrdiff_t i) { return i < 0 ? 0.0 : c.phi_x(p, static_cast<std::size_t>(i)); };
  StatePath x = simulate_linear(c.kernels, history, d, ens);

  FreeTerm free;
  free.phi = [&](std::size_t p, std::size_t i) { return i < n ? c.phi_y(p, i) : 0.0; };
  SolveResult y = solve_absvie(dual_generator(c.kernels, grid, d), free, projector, options);

  std::vector<double> left(paths), right(paths), diff(paths);
  par::for_blocks_guarded(paths, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      double l = 0.0, r = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        l += c.phi_y(p, i) * x.at(p, static_cast<std::ptrdiff_t>(i));
        r += c.phi_x(p, i) * y.solution.y_at(p, i);
      }
      left[p] = h * l;
      right[p] = h * r;
      diff[p] = left[p] - right[p];
    }
  });

  DualityReport rep;
  const Estimate el = summarize(std::move(left));
  const Estimate er = summarize(std::move(right));
  const Estimate ed = summarize(std::move(diff));
  rep.lhs = el.value;
  rep.rhs = er.value;
  rep.lhs_std_error = el.std_error;
  rep.rhs_std_error = er.std_error;
  rep.pooled_std_error = ed.std_error;
  rep.bias_allowance = bias_allowance >= 0.0 ? bias_allowance : 5.0 * h * std::abs(rep.lhs);
  rep.verdict = y.diagnostics.converged &&
                std::abs(rep.gap()) <= 3.0 * rep.pooled_std_error + rep.bias_allowance;
  rep.backward = std::move(y.diagnostics);
  rep.x = std::move(x);
  rep.y = std::move(y.solution);
  return rep;
}

}  // namespace absvie
