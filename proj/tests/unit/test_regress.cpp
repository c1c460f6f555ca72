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

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "absvie/grid_paths.hpp"
#include "absvie/reference.hpp"
#include "absvie/regress.hpp"
#include "doctest.h"

using namespace absvie;

namespace {

struct Sample {
  double mean = 0.0;
  double std_error = 0.0;
};

Sample sample_of(const std::vector<double>& v) {
  double s = 0.0, s2 = 0.0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(v.size());
  const double mean = s / n;
  return {mean, std::sqrt(std::max(0.0, s2 / n - mean * mean) / n)};
}

std::vector<double> column(const PathEnsemble& e, std::size_t node) {
  const auto c = e.brownian_column(node, 0);
  return {c.begin(), c.end()};
}

}  // namespace

TEST_CASE("basis feature counts") {
  CHECK(Basis(1).feature_count(1) == 2);
  CHECK(Basis(3).feature_count(1) == 4);
  CHECK(Basis(2).feature_count(2) == 6);
  CHECK(Basis(3).feature_count(2) == 10);
  CHECK(Basis(2).exponents(2).size() == 5);
  CHECK(Basis(0).feature_count(2) == 1);
  CHECK_THROWS(Basis(-1));
}

TEST_CASE("projection of a basis feature returns it unchanged") {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, 4000, 1, 1);
  const Basis basis(3);
  for (std::size_t j : {1u, 4u, 8u}) {
    std::vector<double> v = column(e, j);
    for (double& x : v) x = 0.5 - 2.0 * x + x * x * x;
    const auto fitted = project(v, j, basis, e);
    double worst = 0.0, scale = 0.0;
    for (std::size_t p = 0; p < v.size(); ++p) {
      worst = std::max(worst, std::abs(fitted[p] - v[p]));
      scale = std::max(scale, std::abs(v[p]));
    }
    CHECK(worst <= 1e-8 * scale);
  }
}

TEST_CASE("projection of independent noise is close to its sample mean") {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, 20000, 1, 2);
  const PathEnsemble noise_source = sample_paths(g, 20000, 1, 3);
  const auto n = noise_source.increment_column(0, 0);
  std::vector<double> v(n.begin(), n.end());
  const Sample s = sample_of(v);
  const auto fitted = project(v, 4, Basis(3), e);
  double worst = 0.0;
  for (double f : fitted) worst = std::max(worst, std::abs(f - s.mean));
  CHECK(worst <= 4.0 * s.std_error * std::sqrt(static_cast<double>(Basis(3).feature_count(1))) * 4.0);
  CHECK(std::abs(sample_of(fitted).mean - s.mean) <= 1e-12);
}

TEST_CASE("martingale coefficient of a constant vanishes") {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, 20000, 1, 4);
  const std::vector<double> v(e.paths(), 3.0);
  const Projector proj(Basis(3), e);
  for (std::size_t j = 0; j < g.steps; ++j) {
    const auto c = proj.martingale_coeff(v, j, 0);
    double worst = 0.0;
    for (double x : c) worst = std::max(worst, std::abs(x));
    CHECK(worst <= 1e-12);
    const Projection raw = proj.fit_increment_product(v, j, 0);
    double rms = 0.0;
    for (double x : proj.predict(raw)) rms += x * x;
    CHECK(std::sqrt(rms / static_cast<double>(v.size())) <= 4.0 * raw.std_error);
  }
}

TEST_CASE("martingale coefficient of W(T) is one") {
  const TimeGrid g = make_grid(1.0, 0.0, 16);
  const PathEnsemble e = sample_paths(g, 100000, 1, 5);
  const std::vector<double> v = column(e, g.steps);
  for (std::size_t j = 0; j < g.steps; ++j) {
    const Sample s = sample_of(martingale_coeff(v, j, 0, Basis(3), e));
    CHECK(std::abs(s.mean - 1.0) <= 0.05);
  }
}

TEST_CASE("martingale coefficient of W(T)^2 is 2 W(t_j)") {
  const TimeGrid g = make_grid(1.0, 0.0, 16);
  const PathEnsemble e = sample_paths(g, 100000, 1, 6);
  std::vector<double> v = column(e, g.steps);
  for (double& x : v) x *= x;
  for (std::size_t j = 1; j < g.steps; ++j) {
    const auto c = martingale_coeff(v, j, 0, Basis(3), e);
    const auto w = e.brownian_column(j, 0);
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < c.size(); ++p) {
      num += (c[p] - 2.0 * w[p]) * (c[p] - 2.0 * w[p]);
      den += 4.0 * w[p] * w[p];
    }
    CHECK(std::sqrt(num / den) <= 0.10);
  }
}

TEST_CASE("projection is linear") {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, 5000, 1, 7);
  std::vector<double> a = column(e, 8), b = column(e, 6), mix(a.size());
  for (double& x : a) x = std::exp(x);
  for (double& x : b) x = std::sin(3.0 * x);
  for (std::size_t p = 0; p < a.size(); ++p) mix[p] = 2.0 * a[p] - 0.5 * b[p];
  const Projector proj(Basis(3), e);
  const auto pa = proj.project(a, 3), pb = proj.project(b, 3), pm = proj.project(mix, 3);
  for (std::size_t p = 0; p < a.size(); ++p) {
    CHECK(pm[p] == doctest::Approx(2.0 * pa[p] - 0.5 * pb[p]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("tower property holds within sampling error") {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, 50000, 1, 8);
  std::vector<double> v = column(e, 8);
  for (double& x : v) x = x * x * x + x;
  const Projector proj(Basis(3), e);
  const auto inner = proj.project(v, 6);
  const auto twice = proj.project(inner, 3);
  const Projection direct_fit = proj.fit(v, 3);
  const auto direct = proj.predict(direct_fit);
  double diff = 0.0;
  for (std::size_t p = 0; p < v.size(); ++p) diff += (twice[p] - direct[p]) * (twice[p] - direct[p]);
  diff = std::sqrt(diff / static_cast<double>(v.size()));
  CHECK(diff <= 3.0 * direct_fit.std_error);
}

TEST_CASE("registered adapted state enters the basis") {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, 4000, 1, 9);
  std::vector<double> x(e.paths() * (g.nodes + 1));
  for (std::size_t i = 0; i <= g.nodes; ++i) {
    for (std::size_t p = 0; p < e.paths(); ++p) x[i * e.paths() + p] = std::exp(e.brownian(p, i, 0));
  }
  Basis basis(1);
  basis.add_state("X", [&](std::size_t p, std::size_t i) { return x[i * e.paths() + p]; });
  CHECK(basis.feature_count(1) == 3);
  CHECK(Basis(2).add_state("X", basis.states()[0].second).feature_count(1) == 6);
  std::vector<double> v(e.paths());
  for (std::size_t p = 0; p < e.paths(); ++p) v[p] = 1.0 + x[5 * e.paths() + p];
  const auto fitted = project(v, 5, basis, e);
  for (std::size_t p = 0; p < v.size(); ++p) CHECK(fitted[p] == doctest::Approx(v[p]).epsilon(1e-8));
}

TEST_CASE("non-finite values are rejected") {
  const TimeGrid g = make_grid(1.0, 0.0, 4);
  const PathEnsemble e = sample_paths(g, 100, 1, 10);
  std::vector<double> v(100, 1.0);
  v[17] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(project(v, 2, Basis(2), e));
  std::vector<double> short_v(99, 1.0);
  CHECK_THROWS(project(short_v, 2, Basis(2), e));
}

TEST_CASE("parallel projector agrees with the serial reference") {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, 6000, 1, 11);
  std::vector<double> v = column(e, 8);
  for (double& x : v) x = std::cos(x) + 0.1 * x * x;
  for (int degree : {1, 2, 3}) {
    const auto fast = project(v, 5, Basis(degree), e);
    const auto slow = reference::project(v, {column(e, 5)}, degree);
    double worst = 0.0;
    for (std::size_t p = 0; p < v.size(); ++p) worst = std::max(worst, std::abs(fast[p] - slow[p]));
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("conditional expectation of W(T)^2") {
  const TimeGrid g = make_grid(1.0, 0.0, 16);
  const PathEnsemble e = sample_paths(g, 100000, 1, 12);
  std::vector<double> v = column(e, g.steps);
  for (double& x : v) x *= x;
  const Projector proj(Basis(2), e);
  for (std::size_t j = 0; j <= g.steps; ++j) {
    const auto fitted = proj.project(v, j);
    const double t = g.time(static_cast<std::ptrdiff_t>(j));
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < v.size(); ++p) {
      const double w = e.brownian(p, j, 0);
      const double exact = w * w + (g.horizon - t);
      num += (fitted[p] - exact) * (fitted[p] - exact);
      den += exact * exact;
    }
    CHECK(std::sqrt(num / den) <= 0.05);
  }
}

TEST_CASE("projection is idempotent and orthogonal") {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, 8000, 1, 13);
  std::vector<double> v = column(e, 8);
  for (double& x : v) x = std::tanh(2.0 * x) + x * x;
  const Projector proj(Basis(3), e);
  const Projection once = proj.fit(v, 4);
  const auto fitted = proj.predict(once);
  const auto twice = proj.project(fitted, 4);
  for (std::size_t p = 0; p < v.size(); ++p) CHECK(twice[p] == doctest::Approx(fitted[p]).epsilon(1e-9).scale(1.0));
  CHECK(proj.design(4).normal_equation_residual(v, once) <= 1e-8);
}
