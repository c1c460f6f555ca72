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

#include "absvie/regularity.hpp"

#include <cmath>
#include <stdexcept>

#include "absvie/parallel.hpp"

namespace absvie {

namespace {

double eval(const Kernel& k, double t, double s) { return k ? k(t, s) : 0.0; }

}  // namespace

GeneratorSpec regularity_generator(const LinearRegularityCase& c, const TimeGrid& grid) {
  GeneratorSpec g;
  g.name = "linear-regularity";
  g.delays.delta = delay_steps(grid, c.delta);
  g.uses.y = static_cast<bool>(c.k_y);
  g.uses.alpha = static_cast<bool>(c.k_alpha);
  g.uses.z = static_cast<bool>(c.k_z);
  g.uses.xi = static_cast<bool>(c.k_xi);
  const Kernel ky = c.k_y, ka = c.k_alpha, kz = c.k_z, kx = c.k_xi;
  g.g = [ky, ka, kz, kx](const GeneratorArgs& a) {
    double v = eval(ky, a.t, a.s) * a.y + eval(ka, a.t, a.s) * a.alpha;
    if (kz) v += kz(a.t, a.s) * a.z[0];
    if (kx) v += kx(a.t, a.s) * a.xi[0];
    return v;
  };
  return g;
}

std::shared_ptr<const Projector> regularity_projector(const LinearRegularityCase& c,
                                                      const PathEnsemble& ens, int degree) {
  const TimeGrid& grid = ens.grid();
  const std::size_t paths = ens.paths();
  std::vector<double> s((grid.steps + 1) * paths, 0.0);
  for (std::size_t i = 1; i <= grid.steps; ++i) {
    const double fi = c.f ? c.f(grid.time(static_cast<std::ptrdiff_t>(i - 1))) : 0.0;
    const auto dw = ens.increment_column(i - 1, 0);
    for (std::size_t p = 0; p < paths; ++p) {
      s[i * paths + p] = s[(i - 1) * paths + p] + fi * dw[p];
    }
  }
  Basis basis(degree);
  basis.without_brownian().add_state("S", [&s, paths](std::size_t p, std::size_t node) {
    return s[node * paths + p];
  });
  return std::make_shared<const Projector>(basis, ens);
}

SolveResult solve_base(const LinearRegularityCase& c, std::shared_ptr<const Projector> projector,
                       const SolveOptions& options) {
  const PathEnsemble& ens = projector->ensemble();
  const TimeGrid& grid = ens.grid();
  const std::size_t paths = ens.paths();
  // phi(t_i) = x0 + sum_{j < min(i, N)} f(t_j) dW_j
  std::vector<double> phi((grid.nodes + 1) * paths, c.x0);
  for (std::size_t i = 1; i <= grid.nodes; ++i) {
    const std::size_t j = i - 1;
    const double fj = j < grid.steps && c.f ? c.f(grid.time(static_cast<std::ptrdiff_t>(j))) : 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
      phi[i * paths + p] = phi[j * paths + p] + (j < grid.steps ? fj * ens.increment(p, j, 0) : 0.0);
    }
  }
  FreeTerm free;
  free.phi = [&phi, paths](std::size_t p, std::size_t i) { return phi[i * paths + p]; };
  return solve_absvie(regularity_generator(c, grid), free, projector, options);
}

SolveResult solve_derivative(const LinearRegularityCase& c, std::size_t r,
                             std::shared_ptr<const Projector> projector,
                             const SolveOptions& options) {
  const TimeGrid& grid = projector->grid();
  if (r >= grid.steps) throw std::out_of_range("solve_derivative: r must lie in [0,T)");
  const double fr = c.f ? c.f(grid.time(static_cast<std::ptrdiff_t>(r))) : 0.0;
  FreeTerm free;
  free.phi = [fr, r](std::size_t, std::size_t i) { return r < i ? fr : 0.0; };
  SolveResult res = solve_absvie(regularity_generator(c, grid), free, projector, options);
  // D_r Y(t) vanishes for t <= t_r.
  const std::size_t paths = projector->paths();
  for (std::size_t i = 0; i <= r; ++i) {
    std::fill_n(res.solution.y.begin() + static_cast<std::ptrdiff_t>(i * paths), paths, 0.0);
    res.solution.mean_y[i] = 0.0;
  }
  return res;
}

RepresentationReport check_representation(const MSolution& base, const MSolution& derivative,
                                          std::size_t r) {
  const TimeGrid& grid = base.grid();
  if (r >= grid.steps) throw std::out_of_range("check_representation: r must lie in [0,T)");
  const std::size_t paths = base.paths();
  const Projector& proj = *base.projector;
  RepresentationReport rep;
  rep.r = r;
  std::vector<double> z(paths), dy(paths), diff(paths);
  for (std::size_t i = r + 1; i <= grid.steps; ++i) {
    base.z.column(i, r, 0, z);
    proj.design(r).predict(proj.fit(derivative.y_column(i), r).coefficients, dy);
    for (std::size_t p = 0; p < paths; ++p) diff[p] = z[p] - dy[p];
    const double num = std::sqrt(par::moments(diff).second);
    const double den = std::sqrt(par::moments(dy).second);
    const double err = den > 0.0 ? num / den : num;
    rep.error.push_back(err);
    rep.z.push_back(par::mean(z));
    rep.dy.push_back(par::mean(dy));
    rep.max_error = std::max(rep.max_error, err);
    rep.mean_error += err;
  }
  if (!rep.error.empty()) rep.mean_error /= static_cast<double>(rep.error.size());
  return rep;
}

}  // namespace absvie
