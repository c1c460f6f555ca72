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
#include <span>
#include <vector>

#include "absvie/absvie_solve.hpp"
#include "absvie/sdvie_sim.hpp"

// Straight-line single-threaded versions of the hot kernels. They share no
// code with the parallel kernels and serve as the reference in tests and
// benchmarks.
namespace absvie::reference {

/// Ridge least-squares projection of `values` onto all monomials of total
/// degree <= `degree` in `variables` (one column per variable).
std::vector<double> project(std::span<const double> values,
                            const std::vector<std::vector<double>>& variables, int degree);

StatePath simulate_sdvie(const SDVIECoeffs& coeffs, const HistorySpec& history,
                         const ControlPath& u1, const ControlPath& u2, const SDVIEDelays& delays,
                         const PathEnsemble& ens);

/// Row accumulation phi(t_i) + h sum_j g(Lambda(t_i, t_j)) evaluated path by
/// path through anticipated_args and pointwise Z evaluation.
std::vector<double> accumulate_row(const MSolution& candidate, const GeneratorSpec& spec,
                                   const FreeTerm& free, std::size_t i);

Estimate performance(const CostFn& cost, const StatePath& state, const ControlPath& u1,
                     const ControlPath& u2, const SDVIEDelays& delays, const TimeGrid& grid);

}  // namespace absvie::reference
