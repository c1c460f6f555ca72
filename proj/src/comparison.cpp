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

#include "absvie/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "absvie/parallel.hpp"

namespace absvie {

namespace {

bool reads_forbidden(const UsageFlags& u) { return u.xi || u.gamma || u.psi || u.beta || u.nu; }

}  // namespace

MonotonicityReport spot_check_monotonicity(const ComparisonCase& c, const TimeGrid& grid,
                                           std::size_t samples, std::uint64_t seed) {
  MonotonicityReport rep;
  rep.samples = samples;
  auto flag = [&](std::size_t n, std::string msg) {
    if (rep.violations == 0) rep.first_violation = n;
    ++rep.violations;
    if (rep.messages.size() < 8) rep.messages.push_back(std::move(msg));
  };
  for (const GeneratorSpec* g : {&c.g1, &c.g2, &c.gbar}) {
    if (!g->g) throw std::invalid_argument("comparison: generator evaluator is missing");
    if (reads_forbidden(g->uses)) {
      flag(0, "generator '" + g->name + "' reads arguments outside (y, z, alpha, mu)");
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::exponential_distribution<double> step(1.0);
  std::uniform_int_distribution<std::size_t> node(0, grid.steps > 0 ? grid.steps - 1 : 0);
  double zv = 0.0;
  GeneratorArgs a;
  a.z = {&zv, 1};
  auto eval = [&](const GeneratorSpec& g, double y, double alpha, double mu) {
    a.y = y;
    a.alpha = alpha;
    a.mu = mu;
    return g.g(a);
  };
  auto draw = [&](double lower) {
    const double v = normal(rng);
    return std::isfinite(lower) ? lower + std::abs(v) : v;
  };
  for (std::size_t n = 0; n < samples; ++n) {
    std::size_t i = node(rng), j = node(rng);
    if (j < i) std::swap(i, j);
    a.i = i;
    a.j = j;
    a.t = grid.time(static_cast<std::ptrdiff_t>(i));
    a.s = grid.time(static_cast<std::ptrdiff_t>(j));
    const double y = draw(c.declared.y_min), alpha = draw(c.declared.alpha_min),
                 mu = draw(c.declared.mu_min);
    zv = normal(rng);
    const double dy = step(rng), dalpha = step(rng), dmu = step(rng);
    const double base = eval(c.gbar, y, alpha, mu);
    if (c.declared.y_nondecreasing && eval(c.gbar, y + dy, alpha, mu) < base) {
      flag(n, "gbar decreases in y");
    }
    if (c.declared.alpha_increasing && eval(c.gbar, y, alpha + dalpha, mu) < base) {
      flag(n, "gbar decreases in alpha");
    }
    if (c.declared.mu_increasing && eval(c.gbar, y, alpha, mu + dmu) < base) {
      flag(n, "gbar decreases in mu");
    }
    if (c.declared.ordered) {
      if (eval(c.g1, y, alpha, mu) > base) flag(n, "g1 exceeds gbar");
      if (base > eval(c.g2, y, alpha, mu)) flag(n, "gbar exceeds g2");
    }
  }
  return rep;
}

OrderingReport run_comparison(const ComparisonCase& c, std::shared_ptr<const Projector> projector,
                              const SolveOptions& options, double stat_factor,
                              std::size_t hypothesis_samples) {
  const TimeGrid& grid = projector->grid();
  const std::size_t paths = projector->paths();
  const auto hyp = spot_check_monotonicity(c, grid, hypothesis_samples, 0x5eedULL);
  if (!hyp.ok()) {
    throw std::invalid_argument("comparison: declared hypotheses fail: " + hyp.messages.front());
  }
  if (!c.phi1.phi || !c.phi2.phi) throw std::invalid_argument("comparison: free term is missing");
  for (std::size_t i = 0; i <= grid.nodes; ++i) {
    for (std::size_t p = 0; p < paths; ++p) {
      if (c.phi1.phi(p, i) > c.phi2.phi(p, i)) {
        throw std::invalid_argument("comparison: phi1 exceeds phi2 at node " + std::to_string(i));
      }
    }
  }

  SolveResult r1 = solve_absvie(c.g1, c.phi1, projector, options);
  SolveResult r2 = solve_absvie(c.g2, c.phi2, projector, options);
  OrderingReport rep;
  const std::size_t nodes = grid.steps + 1;
  rep.violation_fraction.assign(nodes, 0.0);
  rep.worst_margin.assign(nodes, 0.0);
  rep.mean_margin.assign(nodes, 0.0);
  rep.epsilon.assign(nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double se1 = i < grid.steps ? r1.solution.y_std_error[i] : 0.0;
    const double se2 = i < grid.steps ? r2.solution.y_std_error[i] : 0.0;
    const double eps = stat_factor * std::sqrt(se1 * se1 + se2 * se2);
    rep.epsilon[i] = eps;
    const auto y1 = r1.solution.y_column(i);
    const auto y2 = r2.solution.y_column(i);
    const auto acc = par::block_reduce(paths, 3, [&](std::size_t b, std::size_t e, std::span<double> a) {
      for (std::size_t p = b; p < e; ++p) {
        const double m = y2[p] - y1[p];
        if (-m > eps) a[0] += 1.0;
        if (m < 0.0) a[1] += 1.0;
        a[2] += m;
      }
    });
    double worst = paths > 0 ? y2[0] - y1[0] : 0.0;
    for (std::size_t p = 1; p < paths; ++p) worst = std::min(worst, y2[p] - y1[p]);
    const double n = static_cast<double>(paths);
    rep.violation_fraction[i] = acc[0] / n;
    rep.exact_violations += static_cast<std::size_t>(acc[1]);
    rep.mean_margin[i] = acc[2] / n;
    rep.worst_margin[i] = worst;
    rep.max_violation_fraction = std::max(rep.max_violation_fraction, rep.violation_fraction[i]);
  }
  rep.first = std::move(r1.diagnostics);
  rep.second = std::move(r2.diagnostics);
  rep.y1 = std::move(r1.solution);
  rep.y2 = std::move(r2.solution);
  return rep;
}

}  // namespace absvie
