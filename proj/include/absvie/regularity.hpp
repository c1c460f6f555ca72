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
#include <vector>

#include "absvie/absvie_solve.hpp"
#include "absvie/sdvie_sim.hpp"

namespace absvie {

/// Linear equation with deterministic coefficients
///   g = k_y(t,s) Y(s) + k_alpha(t,s) Y(s+delta) + k_z(t,s) Z(t,s) + k_xi(t,s) Z(s,t)
/// and free term phi(t) = x0 + int_0^{T ^ t} f dW (scalar Brownian motion).
struct LinearRegularityCase {
  Kernel k_y;
  Kernel k_alpha;
  Kernel k_z;
  Kernel k_xi;
  double delta = 0.0;
  std::function<double(double t)> f;
  double x0 = 0.0;
};

GeneratorSpec regularity_generator(const LinearRegularityCase& c, const TimeGrid& grid);

/// Projector on the stochastic part S(t) = int_0^{T ^ t} f dW of the free term.
std::shared_ptr<const Projector> regularity_projector(const LinearRegularityCase& c,
                                                      const PathEnsemble& ens, int degree = 3);

SolveResult solve_base(const LinearRegularityCase& c, std::shared_ptr<const Projector> projector,
                       const SolveOptions& options);

/// Solves for (D_r Y, D_r Z): same generator, free term f(t_r) 1{r < i}.
SolveResult solve_derivative(const LinearRegularityCase& c, std::size_t r,
                             std::shared_ptr<const Projector> projector,
                             const SolveOptions& options);

struct RepresentationReport {
  std::size_t r = 0;
  std::vector<double> error;  // relative L2 error per node i > r
  double max_error = 0.0;
  double mean_error = 0.0;
  std::vector<double> z;      // E[Z(t_i, t_r)] per node i > r
  std::vector<double> dy;     // E[D_r Y(t_i)] per node i > r
};

/// Compares Z(t_i, t_r) from the base solution with E[D_r Y(t_i) | F_r].
RepresentationReport check_representation(const MSolution& base, const MSolution& derivative,
                                          std::size_t r);

}  // namespace absvie
