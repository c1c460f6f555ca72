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
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absvie/grid_paths.hpp"
#include "absvie/regress.hpp"

namespace absvie {

/// The Lambda(t,s) argument tuple handed to a generator at node pair
/// (i, j), j >= i. Z-type arguments carry one entry per Brownian dimension.
/// Arguments switched off in UsageFlags are passed as zeros.
struct GeneratorArgs {
  std::size_t path = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  double t = 0.0;
  double s = 0.0;
  double y = 0.0;                 // Y(s)
  std::span<const double> z;      // Z(t,s)
  std::span<const double> xi;     // Z(s,t)
  double alpha = 0.0;             // Y(s+delta)
  std::span<const double> beta;   // Z(t,s+zeta)
  std::span<const double> gamma;  // Z(s+zeta,t)
  double mu = 0.0;                // int_s^{s+delta} e^{lambda(s-r)} Y(r) dr
  std::span<const double> nu;     // int_s^{s+zeta} e^{lambda(s-r)} Z(t,r) dr
  std::span<const double> psi;    // int_s^{s+zeta} e^{lambda(s-r)} Z(r,t) dr
};

struct UsageFlags {
  bool y = false;
  bool z = false;
  bool xi = false;
  bool alpha = false;
  bool beta = false;
  bool gamma = false;
  bool mu = false;
  bool nu = false;
  bool psi = false;

  bool reads_z_row() const { return z || beta || nu; }
  bool reads_z_column() const { return xi || gamma || psi; }
  static UsageFlags all() { return {true, true, true, true, true, true, true, true, true}; }
};

using GeneratorFn = std::function<double(const GeneratorArgs&)>;

struct GeneratorSpec {
  GeneratorFn g;
  UsageFlags uses;
  double lambda = 0.0;
  DelaySpec delays;
  double lipschitz_hint = 0.0;  // 0 when unknown
  std::string name;
};

/// phi(p, i) on nodes 0..nodes; eta(p, i, j, k) on the anticipated region
/// (zero when absent).
struct FreeTerm {
  std::function<double(std::size_t path, std::size_t node)> phi;
  std::function<double(std::size_t path, std::size_t i, std::size_t j, std::size_t k)> eta;
};

/// Two-parameter field Z(t_i, t_j). Cells with i <= steps and j < steps are
/// stored as regression coefficients in the design of node j and evaluated
/// per path on demand; column j = steps is zero; every other cell belongs to
/// the anticipated region and is read from eta.
class ZField {
 public:
  ZField() = default;
  ZField(std::shared_ptr<const Projector> projector, std::size_t dims,
         std::function<double(std::size_t, std::size_t, std::size_t, std::size_t)> eta);

  std::size_t rows() const { return rows_; }
  std::size_t dims() const { return dims_; }

  bool computed(std::size_t i, std::size_t j) const { return i < rows_ && j + 1 < rows_; }
  bool anticipated(std::size_t i, std::size_t j) const { return i >= rows_ || j >= rows_; }

  const std::vector<double>& coefficients(std::size_t i, std::size_t j, std::size_t k) const {
    return coef_[(i * (rows_ - 1) + j) * dims_ + k];
  }
  double std_error(std::size_t i, std::size_t j, std::size_t k) const {
    return se_[(i * (rows_ - 1) + j) * dims_ + k];
  }
  void set(std::size_t i, std::size_t j, std::size_t k, std::vector<double> coef,
           double std_error = 0.0) {
    coef_[(i * (rows_ - 1) + j) * dims_ + k] = std::move(coef);
    se_[(i * (rows_ - 1) + j) * dims_ + k] = std_error;
  }
  const Projector* projector() const { return projector_.get(); }
  bool has_eta() const { return static_cast<bool>(eta_); }

  double value(std::size_t p, std::size_t i, std::size_t j, std::size_t k) const;
  /// Z(i,j,k) on every path.
  void column(std::size_t i, std::size_t j, std::size_t k, std::span<double> out) const;
  /// E[Z(i,j,k)^2] over the ensemble (exact in the fitted design).
  double mean_square(std::size_t i, std::size_t j, std::size_t k) const;

 private:
  std::shared_ptr<const Projector> projector_;
  std::size_t rows_ = 0;  // steps + 1
  std::size_t dims_ = 1;
  std::vector<std::vector<double>> coef_;
  std::vector<double> se_;
  std::function<double(std::size_t, std::size_t, std::size_t, std::size_t)> eta_;
};

struct MSolution {
  std::shared_ptr<const Projector> projector;
  std::vector<double> y;            // node-major, nodes 0..grid.nodes
  std::vector<double> mean_y;       // per node
  std::vector<double> y_std_error;  // regression standard error per node in [0,T)
  ZField z;

  const TimeGrid& grid() const { return projector->grid(); }
  std::size_t paths() const { return projector->paths(); }
  std::span<const double> y_column(std::size_t node) const {
    return {y.data() + node * paths(), paths()};
  }
  double y_at(std::size_t p, std::size_t node) const { return y[node * paths() + p]; }
};

struct Diagnostics {
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> distances;  // M^2 distance between successive iterates
  std::vector<double> ratios;     // distances[k] / distances[k-1]
  double max_y_std_error = 0.0;
  double max_z_std_error = 0.0;
  std::string message;
};

struct SolveOptions {
  double tol = 1e-8;
  std::size_t max_iter = 50;
  const MSolution* initial = nullptr;  // warm start; zero interior when null
};

/// Anticipated arguments of Lambda(t_i, t_j) evaluated on one path.
struct AnticipatedArgs {
  double alpha = 0.0;
  std::vector<double> beta;
  std::vector<double> gamma;
  double mu = 0.0;
  std::vector<double> nu;
  std::vector<double> psi;
};

AnticipatedArgs anticipated_args(const MSolution& candidate, std::size_t p, std::size_t i,
                                 std::size_t j, const GeneratorSpec& spec);

/// Zero-interior starting iterate with boundary rows copied from the free term.
MSolution initial_iterate(const GeneratorSpec& spec, const FreeTerm& free,
                          std::shared_ptr<const Projector> projector);

/// One application of the Picard map. The new iterate is fitted in the designs
/// of `projector`; the candidate may come from another projector on the same
/// ensemble (warm start).
MSolution picard_step(const MSolution& candidate, const GeneratorSpec& spec, const FreeTerm& free,
                      std::shared_ptr<const Projector> projector);
MSolution picard_step(const MSolution& candidate, const GeneratorSpec& spec, const FreeTerm& free);

/// Per-path accumulation phi(t_i) + h sum_{j=i}^{steps-1} g(Lambda(t_i,t_j))
/// with every argument read from `candidate`.
std::vector<double> accumulate_row(const MSolution& candidate, const GeneratorSpec& spec,
                                   const FreeTerm& free, std::size_t i);

/// Squared discrete M^2 distance: h-weighted Y over nodes 0..nodes plus
/// h^2-weighted Z over the computed cells, and over the anticipated region
/// when `anticipated` is set.
double msolution_distance2(const MSolution& a, const MSolution& b, bool anticipated = false);

struct SolveResult {
  MSolution solution;
  Diagnostics diagnostics;
};

SolveResult solve_absvie(const GeneratorSpec& spec, const FreeTerm& free,
                         std::shared_ptr<const Projector> projector, const SolveOptions& options);

SolveResult solve_absvie(const GeneratorSpec& spec, const FreeTerm& free, const PathEnsemble& ens,
                         const Basis& basis, const SolveOptions& options);

/// max over nodes in (0,T] of ||Y_i - E[Y_i] - sum_{j<i} Z(i,j) dW_j|| / ||Y_i||.
double msolution_residual(const MSolution& sol);

struct StabilityReport {
  double solution_distance = 0.0;
  double data_distance = 0.0;
  double ratio = 0.0;  // solution / data, 0 when both vanish
  Diagnostics a;
  Diagnostics b;
};

StabilityReport stability_probe(const GeneratorSpec& spec_a, const FreeTerm& free_a,
                                const GeneratorSpec& spec_b, const FreeTerm& free_b,
                                std::shared_ptr<const Projector> projector,
                                const SolveOptions& options);

struct UsageReport {
  std::size_t samples = 0;
  std::vector<std::string> violations;  // arguments flagged unused that changed g
};

/// Perturbs every argument marked unused on random argument tuples and
/// reports those that change the generator's output.
UsageReport check_usage_flags(const GeneratorSpec& spec, const TimeGrid& grid, std::size_t dims,
                              std::size_t samples, std::uint64_t seed);

}  // namespace absvie
