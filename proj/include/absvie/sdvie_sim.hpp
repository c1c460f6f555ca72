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
#include <functional>
#include <span>
#include <vector>

#include "absvie/grid_paths.hpp"

namespace absvie {

/// Node pair (t_i, s_j) at which a two-time coefficient is evaluated.
struct TimePair {
  std::size_t i;
  std::size_t j;
  double t;
  double s;
};

/// Arguments of the drift b(t,s,x,x_delta,u1,u1_delta,u2,u2_delta); the same
/// tuple feeds running costs.
struct StateArgs {
  double x = 0.0;
  double x_delay = 0.0;
  double u1 = 0.0;
  double u1_delay = 0.0;
  double u2 = 0.0;
  double u2_delay = 0.0;
};

/// Coefficients of a stochastic delay Volterra integral equation. They are only
/// queried for t_i > s_j.
struct SDVIECoeffs {
  std::function<double(const TimePair&, const StateArgs&)> drift;
  std::function<double(const TimePair&, double x, double u1, double u2)> diffusion;
};

using Kernel = std::function<double(double t, double s)>;

/// Deterministic kernels of the linear equation
///   X(t) = phi(t) + int_0^t (A1 X(s) + A2 X(s-delta)) ds + int_0^t A3 X(s) dW(s).
struct LinearKernels {
  Kernel a1;
  Kernel a2;
  Kernel a3;

  /// max |A_k(t_i, s_j)| over grid pairs in [0,T]^2.
  double sup_norm(const TimeGrid& grid) const;
};

/// Free term / initial history phi(p, i) on nodes [-delay, T].
struct HistorySpec {
  std::function<double(std::size_t path, std::ptrdiff_t node)> phi;
};

/// Grid offsets of the state delay and of the two control delays.
struct SDVIEDelays {
  std::size_t state = 0;
  std::size_t control1 = 0;
  std::size_t control2 = 0;
};

/// Per-path table on nodes [-history, steps], node-major.
class NodeTable {
 public:
  NodeTable() = default;
  NodeTable(std::size_t history, std::size_t steps, std::size_t paths, double fill = 0.0);

  std::size_t history() const { return history_; }
  std::size_t steps() const { return steps_; }
  std::size_t paths() const { return paths_; }

  double at(std::size_t p, std::ptrdiff_t node) const {
    return values_[static_cast<std::size_t>(node + static_cast<std::ptrdiff_t>(history_)) * paths_ + p];
  }
  double& at(std::size_t p, std::ptrdiff_t node) {
    return values_[static_cast<std::size_t>(node + static_cast<std::ptrdiff_t>(history_)) * paths_ + p];
  }
  std::span<const double> column(std::ptrdiff_t node) const {
    return {values_.data() + static_cast<std::size_t>(node + static_cast<std::ptrdiff_t>(history_)) * paths_, paths_};
  }
  std::span<double> column(std::ptrdiff_t node) {
    return {values_.data() + static_cast<std::size_t>(node + static_cast<std::ptrdiff_t>(history_)) * paths_, paths_};
  }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const NodeTable&) const = default;

 private:
  std::size_t history_ = 0;
  std::size_t steps_ = 0;
  std::size_t paths_ = 0;
  std::vector<double> values_;
};

/// Per-path open-loop control on [-delay, T].
using ControlPath = NodeTable;
/// Simulated state X on [-delay, T].
using StatePath = NodeTable;

/// Left-point scheme
///   X_i = phi_i + h sum_{j<i} b(t_i,t_j,...) + sum_{j<i} sigma(t_i,t_j,...) dW_j,
/// with the full kernel re-evaluated for every i. Throws SolverError on a
/// non-finite coefficient value, naming the (i, j) where it occurred.
StatePath simulate_sdvie(const SDVIECoeffs& coeffs, const HistorySpec& history,
                         const ControlPath& u1, const ControlPath& u2,
                         const SDVIEDelays& delays, const PathEnsemble& ens);

/// Uncontrolled variant (both controls identically zero).
StatePath simulate_sdvie(const SDVIECoeffs& coeffs, const HistorySpec& history,
                         std::size_t state_delay, const PathEnsemble& ens);

/// Linear equation with scalar Brownian motion (first component of ens).
StatePath simulate_linear(const LinearKernels& kernels, const HistorySpec& history,
                          std::size_t state_delay, const PathEnsemble& ens);

/// Running cost h(i, t, args) integrated over [0, T).
using CostFn = std::function<double(std::size_t node, double t, const StateArgs&)>;

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::vector<double> per_path;
};

/// E[int_0^T h dt] by a left Riemann sum over nodes 0..steps-1, path-averaged.
Estimate performance(const CostFn& cost, const StatePath& state, const ControlPath& u1,
                     const ControlPath& u2, const SDVIEDelays& delays, const TimeGrid& grid);

/// Mean and standard error of a per-path sample.
Estimate summarize(std::vector<double> per_path);

}  // namespace absvie
