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

#include "absvie/regress.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "absvie/parallel.hpp"

namespace absvie {

namespace {

void compositions(int remaining, std::size_t slot, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (slot + 1 == current.size()) {
    current[slot] = remaining;
    out.push_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[slot] = e;
    compositions(remaining - e, slot + 1, current, out);
  }
}

void check_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + ": non-finite regression target");
  }
}

}  // namespace

Basis::Basis(int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("basis degree must be nonnegative");
}

Basis& Basis::add_state(std::string name, NodeValueFn value) {
  states_.emplace_back(std::move(name), std::move(value));
  return *this;
}

Basis& Basis::without_brownian() {
  brownian_ = false;
  return *this;
}

std::size_t Basis::variable_count(std::size_t dims) const {
  return (brownian_ ? dims : 0) + states_.size();
}

std::size_t Basis::feature_count(std::size_t dims) const {
  return exponents(dims).size() + 1;
}

std::vector<std::vector<int>> Basis::exponents(std::size_t dims) const {
  const std::size_t vars = variable_count(dims);
  std::vector<std::vector<int>> out;
  if (vars == 0) return out;
  std::vector<int> current(vars, 0);
  for (int deg = 1; deg <= degree_; ++deg) compositions(deg, 0, current, out);
  if (out.size() + 1 > kMaxFeatures) {
    throw std::invalid_argument("basis: " + std::to_string(out.size() + 1) +
                                " features exceed the limit of " +
                                std::to_string(kMaxFeatures));
  }
  return out;
}

NodeDesign::NodeDesign(std::size_t node, std::size_t paths,
                       const std::vector<std::vector<int>>& exponents,
                       const std::vector<std::vector<double>>& variables)
    : node_(node), paths_(paths) {
  const double n = static_cast<double>(paths);
  std::vector<double> raw(paths);
  for (const auto& expo : exponents) {
    par::for_blocks(paths, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        double v = 1.0;
        for (std::size_t k = 0; k < expo.size(); ++k) {
          for (int q = 0; q < expo[k]; ++q) v *= variables[k][p];
        }
        raw[p] = v;
      }
    });
    const double mean = par::mean(raw);
    check_finite(mean, "basis feature");
    const double var = par::block_reduce(paths, 1, [&](std::size_t b, std::size_t e, std::span<double> acc) {
      double s = 0.0;
      for (std::size_t p = b; p < e; ++p) s += (raw[p] - mean) * (raw[p] - mean);
      acc[0] += s;
    })[0] / n;
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) continue;
    const std::size_t offset = features_.size();
    features_.resize(offset + paths);
    for (std::size_t p = 0; p < paths; ++p) features_[offset + p] = (raw[p] - mean) / sd;
    ++active_;
  }

  const std::size_t a_count = active_;
  gram_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a_count), static_cast<Eigen::Index>(a_count));
  if (a_count == 0) return;
  const auto sums = par::block_reduce(paths, a_count * a_count,
                                      [&](std::size_t b, std::size_t e, std::span<double> acc) {
    for (std::size_t x = 0; x < a_count; ++x) {
      const double* fx = features_.data() + x * paths_;
      for (std::size_t y = 0; y <= x; ++y) {
        const double* fy = features_.data() + y * paths_;
        double s = 0.0;
        for (std::size_t p = b; p < e; ++p) s += fx[p] * fy[p];
        acc[x * a_count + y] += s;
      }
    }
  });
  for (std::size_t x = 0; x < a_count; ++x) {
    for (std::size_t y = 0; y <= x; ++y) {
      const double v = sums[x * a_count + y] / n;
      gram_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = v;
      gram_(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = v;
    }
  }
  ridge_ = 1e-10 * gram_.trace() / static_cast<double>(a_count);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd regularized = gram_;
    regularized.diagonal().array() += ridge_;
    factor_.compute(regularized);
    if (factor_.info() == Eigen::Success) return;
    ridge_ *= 10.0;
  }
  throw std::runtime_error("node design: Gram matrix could not be factorized");
}

Projection NodeDesign::fit(std::span<const double> values) const {
  if (values.size() != paths_) {
    throw std::invalid_argument("project: expected one value per path");
  }
  const double n = static_cast<double>(paths_);
  const double mean = par::mean(values);
  check_finite(mean, "project");
  const std::size_t width = active_ + 1;
  const auto acc = par::block_reduce(paths_, width, [&](std::size_t b, std::size_t e, std::span<double> a) {
    double ss = 0.0;
    for (std::size_t p = b; p < e; ++p) ss += (values[p] - mean) * (values[p] - mean);
    a[0] += ss;
    for (std::size_t x = 0; x < active_; ++x) {
      const double* f = features_.data() + x * paths_;
      double s = 0.0;
      for (std::size_t p = b; p < e; ++p) s += f[p] * (values[p] - mean);
      a[x + 1] += s;
    }
  });
  check_finite(acc[0], "project");

  Projection out;
  out.node = node_;
  out.ridge = ridge_;
  out.coefficients.assign(width, 0.0);
  out.coefficients[0] = mean;
  double explained = 0.0;
  if (active_ > 0) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(active_));
    for (std::size_t x = 0; x < active_; ++x) rhs(static_cast<Eigen::Index>(x)) = acc[x + 1] / n;
    const Eigen::VectorXd beta = factor_.solve(rhs);
    for (std::size_t x = 0; x < active_; ++x) {
      out.coefficients[x + 1] = beta(static_cast<Eigen::Index>(x));
    }
    explained = beta.dot(rhs);
  }
  const double sigma2 = std::max(0.0, acc[0] / n - explained);
  out.std_error = std::sqrt(static_cast<double>(width) * sigma2 / n);
  return out;
}

void NodeDesign::predict(std::span<const double> coef, std::span<double> out) const {
  par::for_blocks(paths_, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) out[p] = coef[0];
    for (std::size_t a = 0; a < active_; ++a) {
      const double c = coef[a + 1];
      const double* f = features_.data() + a * paths_;
      for (std::size_t p = b; p < e; ++p) out[p] += c * f[p];
    }
  });
}

double NodeDesign::mean_square(std::span<const double> coef) const {
  double v = coef[0] * coef[0];
  for (std::size_t x = 0; x < active_; ++x) {
    for (std::size_t y = 0; y < active_; ++y) {
      v += coef[x + 1] * gram_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) *
           coef[y + 1];
    }
  }
  return v;
}

double NodeDesign::normal_equation_residual(std::span<const double> values,
                                            const Projection& fit) const {
  if (active_ == 0) return 0.0;
  std::vector<double> fitted(paths_);
  predict(fit.coefficients, fitted);
  const auto acc = par::block_reduce(paths_, 2 * active_, [&](std::size_t b, std::size_t e, std::span<double> a) {
    for (std::size_t x = 0; x < active_; ++x) {
      const double* f = features_.data() + x * paths_;
      double r = 0.0, s = 0.0;
      for (std::size_t p = b; p < e; ++p) {
        r += f[p] * (values[p] - fitted[p]);
        s += f[p] * values[p];
      }
      a[2 * x] += r;
      a[2 * x + 1] += s;
    }
  });
  double num = 0.0, den = 0.0;
  for (std::size_t x = 0; x < active_; ++x) {
    num += acc[2 * x] * acc[2 * x];
    den += acc[2 * x + 1] * acc[2 * x + 1];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

Projector::Projector(const Basis& basis, const PathEnsemble& ens) : ens_(&ens) {
  const auto& grid = ens.grid();
  const std::size_t paths = ens.paths();
  const auto expo = basis.exponents(ens.dims());
  const std::size_t vars = basis.variable_count(ens.dims());
  designs_.reserve(grid.steps + 1);
  std::vector<std::vector<double>> variables(vars, std::vector<double>(paths));
  for (std::size_t node = 0; node <= grid.steps; ++node) {
    std::size_t v = 0;
    if (basis.uses_brownian()) {
      for (std::size_t k = 0; k < ens.dims(); ++k, ++v) {
        const auto w = ens.brownian_column(node, k);
        std::copy(w.begin(), w.end(), variables[v].begin());
      }
    }
    for (const auto& [name, fn] : basis.states()) {
      auto& column = variables[v++];
      par::for_blocks(paths, [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) column[p] = fn(p, node);
      });
    }
    designs_.emplace_back(node, paths, expo, variables);
  }
}

const NodeDesign& Projector::design(std::size_t node) const {
  if (node >= designs_.size()) {
    throw std::out_of_range("projector: node " + std::to_string(node) + " outside [0,T]");
  }
  return designs_[node];
}

Projection Projector::fit(std::span<const double> values, std::size_t node) const {
  return design(node).fit(values);
}

std::vector<double> Projector::predict(const Projection& fit) const {
  std::vector<double> out(paths());
  design(fit.node).predict(fit.coefficients, out);
  return out;
}

std::vector<double> Projector::project(std::span<const double> values, std::size_t node) const {
  return predict(fit(values, node));
}

Projection Projector::fit_increment_product(std::span<const double> values, std::size_t node,
                                            std::size_t dim) const {
  if (node >= grid().steps) {
    throw std::out_of_range("martingale_coeff: node must lie in [0,T)");
  }
  const auto dw = ens_->increment_column(node, dim);
  std::vector<double> product(paths());
  par::for_blocks(paths(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) product[p] = values[p] * dw[p];
  });
  Projection out = fit(product, node);
  const double inv_h = 1.0 / grid().step;
  for (auto& c : out.coefficients) c *= inv_h;
  out.std_error *= inv_h;
  return out;
}

Projection Projector::fit_martingale(std::span<const double> values, std::size_t node,
                                     std::size_t dim) const {
  if (node >= grid().steps) {
    throw std::out_of_range("martingale_coeff: node must lie in [0,T)");
  }
  const auto level = project(values, node);
  std::vector<double> centred(paths());
  par::for_blocks(paths(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) centred[p] = values[p] - level[p];
  });
  return fit_increment_product(centred, node, dim);
}

std::vector<double> Projector::martingale_coeff(std::span<const double> values, std::size_t node,
                                                std::size_t dim) const {
  return predict(fit_martingale(values, node, dim));
}

std::vector<double> project(std::span<const double> values, std::size_t node, const Basis& basis,
                            const PathEnsemble& ens) {
  return Projector(basis, ens).project(values, node);
}

std::vector<double> martingale_coeff(std::span<const double> values, std::size_t node,
                                     std::size_t dim, const Basis& basis,
                                     const PathEnsemble& ens) {
  return Projector(basis, ens).martingale_coeff(values, node, dim);
}

}  // namespace absvie
