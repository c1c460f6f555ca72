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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace absvie {

/// Uniform discretization of [0, T+K]; node i sits at t_i = i*h.
struct TimeGrid {
  double horizon = 1.0;       // T
  double anticipation = 0.0;  // K
  std::size_t steps = 1;      // nodes in [0,T] are 0..steps
  double step = 1.0;          // h = T / steps
  std::size_t nodes = 1;      // index of the last node, t_nodes = T+K

  double time(std::ptrdiff_t i) const { return static_cast<double>(i) * step; }
  std::size_t anticipation_steps() const { return nodes - steps; }
};

/// Rejects K that is not an integer multiple of h (relative tolerance 1e-12).
TimeGrid make_grid(double horizon, double anticipation, std::size_t steps);

/// Converts a delay in time units to a whole number of grid steps.
/// Throws std::invalid_argument when the delay does not land on a node.
std::size_t delay_steps(const TimeGrid& grid, double delay);

/// Grid-aligned state/argument delays. Constant offsets, optionally overridden
/// node by node (piecewise-constant delays).
struct DelaySpec {
  std::size_t delta = 0;
  std::size_t zeta = 0;
  std::vector<std::size_t> delta_table;  // optional, one entry per node 0..steps
  std::vector<std::size_t> zeta_table;

  std::size_t delta_at(std::size_t node) const {
    return delta_table.empty() ? delta : delta_table[node];
  }
  std::size_t zeta_at(std::size_t node) const {
    return zeta_table.empty() ? zeta : zeta_table[node];
  }

  /// Checks s + delta(s) <= T+K and s + zeta(s) <= T+K for every node in [0,T].
  void validate(const TimeGrid& grid) const;
};

/// Brownian increments for `paths` scenarios. Storage is node-major so that a
/// fixed (node, dim) column is contiguous over paths.
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, std::size_t paths, std::size_t dims, std::uint64_t seed,
               std::vector<double> increments);

  const TimeGrid& grid() const { return grid_; }
  std::size_t paths() const { return paths_; }
  std::size_t dims() const { return dims_; }
  std::uint64_t seed() const { return seed_; }

  /// Delta W over [t_j, t_{j+1}], j in [0, nodes).
  double increment(std::size_t p, std::size_t j, std::size_t k) const {
    return increments_[(j * dims_ + k) * paths_ + p];
  }
  std::span<const double> increment_column(std::size_t j, std::size_t k) const {
    return {increments_.data() + (j * dims_ + k) * paths_, paths_};
  }
  /// W(t_i), i in [0, nodes].
  double brownian(std::size_t p, std::size_t i, std::size_t k) const {
    return brownian_[(i * dims_ + k) * paths_ + p];
  }
  std::span<const double> brownian_column(std::size_t i, std::size_t k) const {
    return {brownian_.data() + (i * dims_ + k) * paths_, paths_};
  }

  /// Same scenarios on a grid `factor` times coarser (increments summed).
  PathEnsemble coarsen(std::size_t factor) const;

 private:
  TimeGrid grid_;
  std::size_t paths_;
  std::size_t dims_;
  std::uint64_t seed_;
  std::vector<double> increments_;
  std::vector<double> brownian_;
};

/// Counter-based sampling: increment (p, j, k) = sqrt(h) * Phi^{-1}(U(seed,p,j,k)).
PathEnsemble sample_paths(const TimeGrid& grid, std::size_t paths, std::size_t dims,
                          std::uint64_t seed);

/// W(t_i) on path p; throws std::out_of_range on bad indices.
std::vector<double> brownian_value(const PathEnsemble& ens, std::size_t p, std::size_t i);

}  // namespace absvie
