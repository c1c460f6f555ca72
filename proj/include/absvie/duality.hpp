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
#include <memory>

#include "absvie/absvie_solve.hpp"
#include "absvie/sdvie_sim.hpp"

namespace absvie {

/// Linear forward equation with kernels A1, A2, A3 and free term phi_x, paired
/// with the backward equation whose generator reads the transposed kernels and
/// whose free term is phi_y.
struct DualityCase {
  LinearKernels kernels;
  std::function<double(std::size_t path, std::size_t node)> phi_x;  // adapted
  std::function<double(std::size_t path, std::size_t node)> phi_y;  // F_T-measurable
  double delta = 0.0;
};

struct DualityReport {
  double lhs = 0.0;  // E int phi_y X dt
  double rhs = 0.0;  // E int phi_x Y dt
  double lhs_std_error = 0.0;
  double rhs_std_error = 0.0;
  double pooled_std_error = 0.0;  // standard error of the paired difference
  double bias_allowance = 0.0;
  bool verdict = false;
  Diagnostics backward;
  StatePath x;
  MSolution y;

  double gap() const { return lhs - rhs; }
};

/// Backward generator of the dual equation:
/// A1(s,t) Y(s) + A2(s+delta, t+delta) Y(s+delta) + A3(s,t) Z(s,t).
/// The drift kernels are read for s > t only and the A2 term is dropped once
/// s+delta leaves [0,T]; the Z(s,t) term also reads the diagonal cell s = t.
GeneratorSpec dual_generator(const LinearKernels& kernels, const TimeGrid& grid,
                             std::size_t delay);

/// Runs both sides on the ensemble of `projector`. `bias_allowance < 0`
/// selects the default 5 h |lhs|.
DualityReport check_duality(const DualityCase& c, std::shared_ptr<const Projector> projector,
                            const SolveOptions& options, double bias_allowance = -1.0);

}  // namespace absvie
