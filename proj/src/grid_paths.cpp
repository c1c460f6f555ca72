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

#include "absvie/grid_paths.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "absvie/parallel.hpp"
#include "absvie/rng.hpp"

namespace absvie {

namespace {

std::size_t aligned_steps(double span, double step, const char* what) {
  const double ratio = span / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-12 * std::max(1.0, std::abs(ratio))) {
    throw std::invalid_argument(std::string(what) + " = " + std::to_string(span) +
                                " is not an integer multiple of the step h = " +
                                std::to_string(step));
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

TimeGrid make_grid(double horizon, double anticipation, std::size_t steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("grid: horizon T must be positive");
  }
  if (!(anticipation >= 0.0) || !std::isfinite(anticipation)) {
    throw std::invalid_argument("grid: anticipation span K must be nonnegative");
  }
  if (steps < 1) throw std::invalid_argument("grid: need at least one step in [0,T]");
  TimeGrid grid;
  grid.horizon = horizon;
  grid.anticipation = anticipation;
  grid.steps = steps;
  grid.step = horizon / static_cast<double>(steps);
  grid.nodes = steps + aligned_steps(anticipation, grid.step, "grid: K");
  return grid;
}

std::size_t delay_steps(const TimeGrid& grid, double delay) {
  if (!(delay >= 0.0)) throw std::invalid_argument("delay must be nonnegative");
  return aligned_steps(delay, grid.step, "delay");
}

void DelaySpec::validate(const TimeGrid& grid) const {
  auto check_table = [&](const std::vector<std::size_t>& table, const char* name) {
    if (!table.empty() && table.size() != grid.steps + 1) {
      throw std::invalid_argument(std::string("delay table ") + name +
                                  " must have one entry per node in [0,T]");
    }
  };
  check_table(delta_table, "delta");
  check_table(zeta_table, "zeta");
  for (std::size_t i = 0; i <= grid.steps; ++i) {
    if (i + delta_at(i) > grid.nodes || i + zeta_at(i) > grid.nodes) {
      throw std::invalid_argument("delay at node " + std::to_string(i) +
                                  " reaches beyond T+K");
    }
  }
}

PathEnsemble::PathEnsemble(TimeGrid grid, std::size_t paths, std::size_t dims,
                           std::uint64_t seed, std::vector<double> increments)
    : grid_(grid), paths_(paths), dims_(dims), seed_(seed), increments_(std::move(increments)) {
  if (paths_ < 1 || dims_ < 1) {
    throw std::invalid_argument("ensemble: need at least one path and one dimension");
  }
  if (increments_.size() != grid_.nodes * dims_ * paths_) {
    throw std::invalid_argument("ensemble: increment array has the wrong size");
  }
  brownian_.assign((grid_.nodes + 1) * dims_ * paths_, 0.0);
  for (std::size_t k = 0; k < dims_; ++k) {
    par::for_blocks(paths_, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = 0; i < grid_.nodes; ++i) {
        const double* inc = increments_.data() + (i * dims_ + k) * paths_;
        const double* w = brownian_.data() + (i * dims_ + k) * paths_;
        double* next = brownian_.data() + ((i + 1) * dims_ + k) * paths_;
        for (std::size_t p = b; p < e; ++p) next[p] = w[p] + inc[p];
      }
    });
  }
}

PathEnsemble PathEnsemble::coarsen(std::size_t factor) const {
  if (factor < 1 || grid_.steps % factor != 0 || grid_.nodes % factor != 0) {
    throw std::invalid_argument("coarsen: factor must divide the step counts");
  }
  const TimeGrid coarse = make_grid(grid_.horizon, grid_.anticipation, grid_.steps / factor);
  std::vector<double> inc(coarse.nodes * dims_ * paths_, 0.0);
  for (std::size_t j = 0; j < coarse.nodes; ++j) {
    for (std::size_t k = 0; k < dims_; ++k) {
      double* out = inc.data() + (j * dims_ + k) * paths_;
      for (std::size_t l = 0; l < factor; ++l) {
        const auto fine = increment_column(j * factor + l, k);
        for (std::size_t p = 0; p < paths_; ++p) out[p] += fine[p];
      }
    }
  }
  return PathEnsemble(coarse, paths_, dims_, seed_, std::move(inc));
}

PathEnsemble sample_paths(const TimeGrid& grid, std::size_t paths, std::size_t dims,
                          std::uint64_t seed) {
  if (paths < 1 || dims < 1) {
    throw std::invalid_argument("sample_paths: need at least one path and one dimension");
  }
  std::vector<double> inc(grid.nodes * dims * paths);
  const double scale = std::sqrt(grid.step);
  par::for_blocks(paths, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = 0; j < grid.nodes; ++j) {
      for (std::size_t k = 0; k < dims; ++k) {
        double* col = inc.data() + (j * dims + k) * paths;
        for (std::size_t p = b; p < e; ++p) col[p] = scale * rng::gaussian(seed, p, j, k);
      }
    }
  });
  return PathEnsemble(grid, paths, dims, seed, std::move(inc));
}

std::vector<double> brownian_value(const PathEnsemble& ens, std::size_t p, std::size_t i) {
  if (p >= ens.paths() || i > ens.grid().nodes) {
    throw std::out_of_range("brownian_value: index out of range");
  }
  std::vector<double> w(ens.dims());
  for (std::size_t k = 0; k < ens.dims(); ++k) w[k] = ens.brownian(p, i, k);
  return w;
}

}  // namespace absvie
