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

#include "absvie/reference.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace absvie::reference {

namespace {

void monomials(std::size_t var, int remaining, std::vector<int>& expo,
               std::vector<std::vector<int>>& out) {
  if (var == expo.size()) {
    int total = 0;
    for (int e : expo) total += e;
    if (total > 0) out.push_back(expo);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    expo[var] = e;
    monomials(var + 1, remaining - e, expo, out);
  }
  expo[var] = 0;
}

}  // namespace

std::vector<double> project(std::span<const double> values,
                            const std::vector<std::vector<double>>& variables, int degree) {
  const std::size_t n = values.size();
  std::vector<int> expo(variables.size(), 0);
  std::vector<std::vector<int>> all;
  monomials(0, degree, expo, all);

  double ybar = 0.0;
  for (double v : values) ybar += v;
  ybar /= static_cast<double>(n);

  std::vector<std::vector<double>> cols;
  for (const auto& e : all) {
    std::vector<double> c(n, 1.0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t k = 0; k < e.size(); ++k) c[p] *= std::pow(variables[k][p], e[k]);
    }
    double m = 0.0;
    for (double v : c) m += v;
    m /= static_cast<double>(n);
    double var = 0.0;
    for (double v : c) var += (v - m) * (v - m);
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m)))) continue;
    for (double& v : c) v = (v - m) / sd;
    cols.push_back(std::move(c));
  }

  const auto a = static_cast<Eigen::Index>(cols.size());
  std::vector<double> out(n, ybar);
  if (a == 0) return out;
  Eigen::MatrixXd gram(a, a);
  Eigen::VectorXd rhs(a);
  for (Eigen::Index x = 0; x < a; ++x) {
    double r = 0.0;
    for (std::size_t p = 0; p < n; ++p) r += cols[x][p] * (values[p] - ybar);
    rhs(x) = r / static_cast<double>(n);
    for (Eigen::Index y = 0; y < a; ++y) {
      double s = 0.0;
      for (std::size_t p = 0; p < n; ++p) s += cols[x][p] * cols[y][p];
      gram(x, y) = s / static_cast<double>(n);
    }
  }
  double ridge = 1e-10 * gram.trace() / static_cast<double>(a);
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += ridge;
    llt.compute(reg);
    if (llt.info() == Eigen::Success) break;
    ridge *= 10.0;
  }
  const Eigen::VectorXd beta = llt.solve(rhs);
  for (std::size_t p = 0; p < n; ++p) {
    for (Eigen::Index x = 0; x < a; ++x) out[p] += beta(x) * cols[x][p];
  }
  return out;
}

StatePath simulate_sdvie(const SDVIECoeffs& coeffs, const HistorySpec& history,
                         const ControlPath& u1, const ControlPath& u2, const SDVIEDelays& delays,
                         const PathEnsemble& ens) {
  const TimeGrid& grid = ens.grid();
  const auto d = static_cast<std::ptrdiff_t>(delays.state);
  const auto d1 = static_cast<std::ptrdiff_t>(delays.control1);
  const auto d2 = static_cast<std::ptrdiff_t>(delays.control2);
  const auto last = static_cast<std::ptrdiff_t>(grid.steps);
  StatePath x(delays.state, grid.steps, ens.paths());
  for (std::size_t p = 0; p < ens.paths(); ++p) {
    for (std::ptrdiff_t i = -d; i <= last; ++i) {
      double drift = 0.0, noise = 0.0;
      for (std::ptrdiff_t j = 0; j < i; ++j) {
        const TimePair tp{static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                          static_cast<double>(i) * grid.step, static_cast<double>(j) * grid.step};
        const StateArgs a{x.at(p, j), x.at(p, j - d), u1.at(p, j), u1.at(p, j - d1), u2.at(p, j),
                          u2.at(p, j - d2)};
        if (coeffs.drift) drift += coeffs.drift(tp, a);
        if (coeffs.diffusion) {
          noise += coeffs.diffusion(tp, a.x, a.u1, a.u2) * ens.increment(p, static_cast<std::size_t>(j), 0);
        }
      }
      x.at(p, i) = history.phi(p, i) + grid.step * drift + noise;
    }
  }
  return x;
}

std::vector<double> accumulate_row(const MSolution& candidate, const GeneratorSpec& spec,
                                   const FreeTerm& free, std::size_t i) {
  const TimeGrid& grid = candidate.grid();
  const std::size_t dims = candidate.z.dims();
  std::vector<double> out(candidate.paths());
  std::vector<double> z(dims), xi(dims);
  for (std::size_t p = 0; p < candidate.paths(); ++p) {
    double sum = 0.0;
    for (std::size_t j = i; j < grid.steps; ++j) {
      const AnticipatedArgs ant = anticipated_args(candidate, p, i, j, spec);
      for (std::size_t k = 0; k < dims; ++k) {
        z[k] = candidate.z.value(p, i, j, k);
        xi[k] = candidate.z.value(p, j, i, k);
      }
      GeneratorArgs a;
      a.path = p;
      a.i = i;
      a.j = j;
      a.t = static_cast<double>(i) * grid.step;
      a.s = static_cast<double>(j) * grid.step;
      a.y = candidate.y_at(p, j);
      a.z = z;
      a.xi = xi;
      a.alpha = ant.alpha;
      a.beta = ant.beta;
      a.gamma = ant.gamma;
      a.mu = ant.mu;
      a.nu = ant.nu;
      a.psi = ant.psi;
      sum += spec.g(a);
    }
    out[p] = free.phi(p, i) + grid.step * sum;
  }
  return out;
}

Estimate performance(const CostFn& cost, const StatePath& state, const ControlPath& u1,
                     const ControlPath& u2, const SDVIEDelays& delays, const TimeGrid& grid) {
  const auto d = static_cast<std::ptrdiff_t>(delays.state);
  const auto d1 = static_cast<std::ptrdiff_t>(delays.control1);
  const auto d2 = static_cast<std::ptrdiff_t>(delays.control2);
  const std::size_t m = state.paths();
  std::vector<double> per_path(m);
  double mean = 0.0;
  for (std::size_t p = 0; p < m; ++p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.steps; ++i) {
      const auto k = static_cast<std::ptrdiff_t>(i);
      const StateArgs a{state.at(p, k), state.at(p, k - d), u1.at(p, k), u1.at(p, k - d1),
                        u2.at(p, k), u2.at(p, k - d2)};
      acc += cost(i, static_cast<double>(i) * grid.step, a);
    }
    per_path[p] = grid.step * acc;
    mean += per_path[p];
  }
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double v : per_path) var += (v - mean) * (v - mean);
  Estimate e;
  e.value = mean;
  e.std_error = m > 1 ? std::sqrt(var / static_cast<double>(m - 1) / static_cast<double>(m)) : 0.0;
  e.per_path = std::move(per_path);
  return e;
}

}  // namespace absvie::reference
