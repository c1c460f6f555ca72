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

#include "absvie/sdvie_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "absvie/errors.hpp"
#include "absvie/parallel.hpp"

namespace absvie {

namespace {

void check_control(const ControlPath& u, std::size_t delay, const PathEnsemble& ens,
                   const char* name) {
  if (u.paths() != ens.paths() || u.steps() != ens.grid().steps || u.history() < delay) {
    throw std::invalid_argument(std::string("simulate_sdvie: control ") + name +
                                " does not cover [-delay, T] on every path");
  }
}

}  // namespace

double LinearKernels::sup_norm(const TimeGrid& grid) const {
  double s = 0.0;
  for (std::size_t i = 0; i <= grid.steps; ++i) {
    for (std::size_t j = 0; j <= grid.steps; ++j) {
      const double t = grid.time(static_cast<std::ptrdiff_t>(i));
      const double u = grid.time(static_cast<std::ptrdiff_t>(j));
      for (const Kernel* k : {&a1, &a2, &a3}) {
        if (*k) s = std::max(s, std::abs((*k)(t, u)));
      }
    }
  }
  return s;
}

NodeTable::NodeTable(std::size_t history, std::size_t steps, std::size_t paths, double fill)
    : history_(history), steps_(steps), paths_(paths), values_((history + steps + 1) * paths, fill) {}

StatePath simulate_sdvie(const SDVIECoeffs& coeffs, const HistorySpec& history,
                         const ControlPath& u1, const ControlPath& u2,
                         const SDVIEDelays& delays, const PathEnsemble& ens) {
  const TimeGrid& grid = ens.grid();
  const std::size_t n = grid.steps;
  const double h = grid.step;
  const auto d = static_cast<std::ptrdiff_t>(delays.state);
  const auto d1 = static_cast<std::ptrdiff_t>(delays.control1);
  const auto d2 = static_cast<std::ptrdiff_t>(delays.control2);
  if (!history.phi) throw std::invalid_argument("simulate_sdvie: free term phi is required");
  check_control(u1, delays.control1, ens, "u1");
  check_control(u2, delays.control2, ens, "u2");

  StatePath x(delays.state, n, ens.paths());
  par::for_blocks_guarded(ens.paths(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      for (std::ptrdiff_t i = -d; i <= static_cast<std::ptrdiff_t>(n); ++i) {
        const double phi = history.phi(p, i);
        if (!std::isfinite(phi)) {
          throw SolverError("simulate_sdvie: non-finite free term", static_cast<std::size_t>(i + d), 0);
        }
        double drift = 0.0;
        double noise = 0.0;
        for (std::ptrdiff_t j = 0; j < i; ++j) {
          const TimePair tp{static_cast<std::size_t>(i), static_cast<std::size_t>(j), grid.time(i),
                            grid.time(j)};
          const StateArgs args{x.at(p, j),      x.at(p, j - d),  u1.at(p, j),
                               u1.at(p, j - d1), u2.at(p, j),     u2.at(p, j - d2)};
          const double bv = coeffs.drift ? coeffs.drift(tp, args) : 0.0;
          const double sv = coeffs.diffusion ? coeffs.diffusion(tp, args.x, args.u1, args.u2) : 0.0;
          if (!std::isfinite(bv) || !std::isfinite(sv)) {
            throw SolverError("simulate_sdvie: non-finite coefficient", tp.i, tp.j);
          }
          drift += bv;
          noise += sv * ens.increment(p, static_cast<std::size_t>(j), 0);
        }
        x.at(p, i) = phi + h * drift + noise;
      }
    }
  });
  return x;
}

StatePath simulate_sdvie(const SDVIECoeffs& coeffs, const HistorySpec& history,
                         std::size_t state_delay, const PathEnsemble& ens) {
  const ControlPath zero(0, ens.grid().steps, ens.paths());
  return simulate_sdvie(coeffs, history, zero, zero, SDVIEDelays{state_delay, 0, 0}, ens);
}

StatePath simulate_linear(const LinearKernels& kernels, const HistorySpec& history,
                          std::size_t state_delay, const PathEnsemble& ens) {
  SDVIECoeffs coeffs;
  coeffs.drift = [&](const TimePair& tp, const StateArgs& a) {
    double v = 0.0;
    if (kernels.a1) v += kernels.a1(tp.t, tp.s) * a.x;
    if (kernels.a2) v += kernels.a2(tp.t, tp.s) * a.x_delay;
    return v;
  };
  if (kernels.a3) {
    coeffs.diffusion = [&](const TimePair& tp, double x, double, double) {
      return kernels.a3(tp.t, tp.s) * x;
    };
  }
  return simulate_sdvie(coeffs, history, state_delay, ens);
}

Estimate summarize(std::vector<double> per_path) {
  Estimate out;
  const std::size_t m = per_path.size();
  if (m > 0) {
    const double mean = par::mean(per_path);
    out.value = mean;
    const double var = par::block_reduce(m, 1, [&](std::size_t b, std::size_t e, std::span<double> acc) {
      double s = 0.0;
      for (std::size_t p = b; p < e; ++p) s += (per_path[p] - mean) * (per_path[p] - mean);
      acc[0] += s;
    })[0] / static_cast<double>(m);
    out.std_error = m > 1 ? std::sqrt(var * static_cast<double>(m) / static_cast<double>(m - 1) /
                                      static_cast<double>(m))
                          : 0.0;
  }
  out.per_path = std::move(per_path);
  return out;
}

Estimate performance(const CostFn& cost, const StatePath& state, const ControlPath& u1,
                     const ControlPath& u2, const SDVIEDelays& delays, const TimeGrid& grid) {
  const std::size_t paths = state.paths();
  const auto d = static_cast<std::ptrdiff_t>(delays.state);
  const auto d1 = static_cast<std::ptrdiff_t>(delays.control1);
  const auto d2 = static_cast<std::ptrdiff_t>(delays.control2);
  std::vector<double> per_path(paths, 0.0);
  par::for_blocks_guarded(paths, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      double acc = 0.0;
      for (std::size_t i = 0; i < grid.steps; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        const StateArgs args{state.at(p, k),  state.at(p, k - d), u1.at(p, k),
                             u1.at(p, k - d1), u2.at(p, k),       u2.at(p, k - d2)};
        const double c = cost(i, grid.time(k), args);
        if (!std::isfinite(c)) throw SolverError("performance: non-finite running cost", i, p);
        acc += c;
      }
      per_path[p] = grid.step * acc;
    }
  });
  return summarize(std::move(per_path));
}

}  // namespace absvie
