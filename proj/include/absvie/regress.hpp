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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absvie/grid_paths.hpp"

namespace absvie {

/// Adapted scalar attached to (path, node), e.g. X(t_j) of a simulated state.
using NodeValueFn = std::function<double(std::size_t path, std::size_t node)>;

/// Polynomial feature basis for conditional expectations at a node. The
/// variables are the Brownian components W(t_j) plus any registered adapted
/// state; features are the constant plus all monomials of total degree
/// 1..degree in those variables.
class Basis {
 public:
  static constexpr std::size_t kMaxFeatures = 35;

  explicit Basis(int degree = 3);

  /// Registers an adapted state variable. The function is called only for
  /// nodes in [0, T] and must depend on information available at that node.
  Basis& add_state(std::string name, NodeValueFn value);
  Basis& without_brownian();

  int degree() const { return degree_; }
  bool uses_brownian() const { return brownian_; }
  const std::vector<std::pair<std::string, NodeValueFn>>& states() const { return states_; }

  std::size_t variable_count(std::size_t dims) const;
  /// Number of features including the constant.
  std::size_t feature_count(std::size_t dims) const;
  /// Exponent tuples of the non-constant monomials, graded order.
  std::vector<std::vector<int>> exponents(std::size_t dims) const;

 private:
  int degree_;
  bool brownian_ = true;
  std::vector<std::pair<std::string, NodeValueFn>> states_;
};

/// Least-squares fit at one node. coefficients[0] multiplies the constant
/// feature; the rest multiply the node design's standardized features.
struct Projection {
  std::size_t node = 0;
  std::vector<double> coefficients;
  double ridge = 0.0;
  /// RMS standard error of the fitted values, sqrt(features * sigma^2 / paths).
  double std_error = 0.0;
};

/// Feature matrix of one node, centred and scaled, with the factorized
/// ridge-regularized Gram matrix. Zero-variance features are dropped.
class NodeDesign {
 public:
  NodeDesign(std::size_t node, std::size_t paths, const std::vector<std::vector<int>>& exponents,
             const std::vector<std::vector<double>>& variables);

  std::size_t node() const { return node_; }
  std::size_t paths() const { return paths_; }
  /// Coefficient count of a fit (constant + active features).
  std::size_t width() const { return active_ + 1; }
  double ridge() const { return ridge_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  std::span<const double> feature(std::size_t a) const {
    return {features_.data() + a * paths_, paths_};
  }

  Projection fit(std::span<const double> values) const;

  double predict(std::span<const double> coef, std::size_t p) const {
    double v = coef[0];
    for (std::size_t a = 0; a < active_; ++a) v += coef[a + 1] * features_[a * paths_ + p];
    return v;
  }
  void predict(std::span<const double> coef, std::span<double> out) const;
  /// Path average of the squared fitted function, from the Gram matrix.
  double mean_square(std::span<const double> coef) const;
  /// ||S^T (v - fitted)|| / ||S^T v|| over the active features.
  double normal_equation_residual(std::span<const double> values, const Projection& fit) const;

 private:
  std::size_t node_;
  std::size_t paths_;
  std::size_t active_ = 0;
  std::vector<double> features_;  // active-major, contiguous over paths
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  double ridge_ = 0.0;
};

/// Node designs for every node of [0, T] on one ensemble. The ensemble must
/// outlive the projector.
class Projector {
 public:
  Projector(const Basis& basis, const PathEnsemble& ens);

  const PathEnsemble& ensemble() const { return *ens_; }
  const TimeGrid& grid() const { return ens_->grid(); }
  std::size_t paths() const { return ens_->paths(); }
  const NodeDesign& design(std::size_t node) const;

  Projection fit(std::span<const double> values, std::size_t node) const;
  std::vector<double> predict(const Projection& fit) const;
  std::vector<double> project(std::span<const double> values, std::size_t node) const;

  /// (1/h) * fit(values * dW^k_j) with the values used as given.
  Projection fit_increment_product(std::span<const double> values, std::size_t node,
                                   std::size_t dim) const;
  /// Coefficient of the discrete martingale representation at node j,
  /// component k: (1/h) * fit((values - project(values, j)) * dW^k_j).
  Projection fit_martingale(std::span<const double> values, std::size_t node,
                            std::size_t dim) const;
  std::vector<double> martingale_coeff(std::span<const double> values, std::size_t node,
                                       std::size_t dim) const;

 private:
  const PathEnsemble* ens_;
  std::vector<NodeDesign> designs_;
};

/// Fitted E[V | F_{t_j}] per path.
std::vector<double> project(std::span<const double> values, std::size_t node, const Basis& basis,
                            const PathEnsemble& ens);

/// (1/h) E[V dW^k_j | F_{t_j}] per path.
std::vector<double> martingale_coeff(std::span<const double> values, std::size_t node,
                                     std::size_t dim, const Basis& basis,
                                     const PathEnsemble& ens);

}  // namespace absvie
