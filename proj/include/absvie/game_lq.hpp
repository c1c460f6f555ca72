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

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "absvie/absvie_solve.hpp"
#include "absvie/sdvie_sim.hpp"

namespace absvie {

using TimeFn = std::function<double(double t)>;
using PathHistory = std::function<double(std::size_t path, std::ptrdiff_t node)>;

/// Data owned by one player: control kernels, cost weights, control delay and
/// control history on [-delay, 0).
struct PlayerSpec {
  Kernel b;   // drift kernel of u_i(s)
  Kernel c;   // drift kernel of u_i(s - delta_i)
  Kernel bt;  // diffusion kernel of u_i(s)
  TimeFn q;   // weight of X(t)^2
  TimeFn qt;  // weight of X(t - delta)^2
  TimeFn r;   // weight of u_i(t)^2
  TimeFn rt;  // weight of u_i(t - delta_i)^2
  double delay = 0.0;
  PathHistory history;  // zero when empty
};

/// Linear-quadratic two-player game with state kernels a1, a2 (delayed state)
/// and at1 (diffusion). Kernels live on t > s and are never read on the
/// diagonal.
struct LQGameSpec {
  Kernel a1;
  Kernel a2;
  Kernel at1;
  double delta = 0.0;
  PathHistory phi;  // free term on [-delta, T]
  std::array<PlayerSpec, 2> players;

  /// Checks delays against the grid and r_i(t) + rt_i(t + delta_i) > 0.
  void validate(const TimeGrid& grid) const;
  /// Same game with the roles of the two players exchanged.
  LQGameSpec swapped() const;
};

struct GameDelays {
  std::size_t state = 0;
  std::array<std::size_t, 2> control{0, 0};
};

GameDelays game_delays(const LQGameSpec& spec, const TimeGrid& grid);

/// Control tables for both players on [-delta_i, T], history rows filled.
std::array<ControlPath, 2> zero_controls(const LQGameSpec& spec, const PathEnsemble& ens);

StatePath simulate_game(const LQGameSpec& spec, const std::array<ControlPath, 2>& u,
                        const PathEnsemble& ens);

/// J_i = (1/2) E int_0^T (q X^2 + qt X_delta^2 + r u_i^2 + rt u_i,delta^2) dt.
Estimate game_cost(const LQGameSpec& spec, std::size_t player, const StatePath& x,
                   const std::array<ControlPath, 2>& u, const TimeGrid& grid);

/// r_i(t_k) + rt_i(t_k + delta_i), the latter dropped once t_k + delta_i > T.
double control_weight(const LQGameSpec& spec, std::size_t player, std::size_t node,
                      const TimeGrid& grid);

struct AdjointSolution {
  MSolution y;                      // (Y_i, Z_i)
  std::vector<double> y0;           // node-major on [0,T]; zero at T
  std::vector<double> y0_raw;       // integrals before conditioning, nodes [0,T)
  std::vector<double> y0_std_error; // per node in [0,T)
  Diagnostics diagnostics;

  std::span<const double> y0_column(std::size_t node) const {
    return {y0.data() + node * y.paths(), y.paths()};
  }
};

/// Basis of polynomials in (W, X) on the ensemble.
std::shared_ptr<const Projector> game_projector(const StatePath& x, const PathEnsemble& ens,
                                                int degree);

/// Generator a1(s,t) y + a2(s+delta,t+delta) alpha + at1(s,t) xi of the adjoint.
GeneratorSpec adjoint_generator(const LQGameSpec& spec, const TimeGrid& grid);

AdjointSolution solve_adjoint(const LQGameSpec& spec, const StatePath& x, std::size_t player,
                              std::shared_ptr<const Projector> projector,
                              const SolveOptions& options);

/// Z0_i(t_k, t_j) for j >= k on every path, reconstructed from the raw integral.
std::vector<double> adjoint_z0(const AdjointSolution& adj, std::size_t k, std::size_t j);

/// u_i = -Y0_i / (r_i + rt_i(. + delta_i)) on [0,T]; histories copied from `current`.
std::array<ControlPath, 2> nash_update(const LQGameSpec& spec, const TimeGrid& grid,
                                       const std::array<AdjointSolution, 2>& adjoints,
                                       const std::array<ControlPath, 2>& current);

struct NashOptions {
  int degree = 2;
  double damping = 0.5;
  double tol = 1e-6;
  std::size_t max_iter = 200;
  SolveOptions adjoint{1e-10, 100, nullptr};
};

struct NashIterate {
  std::array<ControlPath, 2> u;
  std::size_t iteration = 0;
  double distance = 0.0;
};

struct NashDiagnostics {
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> distances;
  std::vector<double> cost1;
  std::vector<double> cost2;
  double final_cycle_distance = 0.0;  // undamped extra cycle at the fixed point
  std::string message;
};

struct NashResult {
  NashIterate iterate;
  StatePath state;
  std::array<AdjointSolution, 2> adjoints;  // evaluated at the returned controls
  std::shared_ptr<const Projector> projector;
  NashDiagnostics diagnostics;
};

/// L2 distance sqrt(h sum_{k<N} E|a_k - b_k|^2) over [0,T) for both players.
double control_distance(const std::array<ControlPath, 2>& a, const std::array<ControlPath, 2>& b,
                        const TimeGrid& grid);

NashResult solve_nash(const LQGameSpec& spec, const PathEnsemble& ens, const NashOptions& options);

struct StationarityReport {
  std::array<std::vector<double>, 2> residual;  // normalized, per node in [0,T)
  std::array<double, 2> max_residual{0.0, 0.0};
  std::array<double, 2> max_std_error{0.0, 0.0};  // regression error of Y0, normalized
};

StationarityReport stationarity_residual(const LQGameSpec& spec, const TimeGrid& grid,
                                         const NashIterate& iterate,
                                         const std::array<AdjointSolution, 2>& adjoints);

struct PerturbationRow {
  std::size_t player = 0;
  std::size_t direction = 0;
  double epsilon = 0.0;
  double delta_j = 0.0;
  double std_error = 0.0;
};

/// Re-simulates with u_i* + eps v (other player fixed) and reports the paired
/// change of J_i.
std::vector<PerturbationRow> perturbation_check(const LQGameSpec& spec, const NashResult& result,
                                                const std::vector<ControlPath>& directions,
                                                const std::vector<double>& epsilons,
                                                const PathEnsemble& ens);

/// H_i = -(Y0_i + r_i u_i* + rt_i(. + delta_i) u_i*) u per path at node k.
std::vector<double> hamiltonian(const LQGameSpec& spec, const TimeGrid& grid,
                                const NashIterate& iterate, const AdjointSolution& adjoint,
                                std::size_t player, std::size_t node, double u);

}  // namespace absvie
