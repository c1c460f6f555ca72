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

#include <atomic>
#include <cmath>
#include <memory>
#include <vector>

#include "absvie/duality.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace absvie;

namespace {

std::shared_ptr<const Projector> projector(const PathEnsemble& e, int degree = 3) {
  return std::make_shared<const Projector>(Basis(degree), e);
}

}  // namespace

TEST_CASE("zero kernels reduce both sides to the same expectation") {
  const TimeGrid g = make_grid(1.0, 0.25, 16);
  const PathEnsemble e = sample_paths(g, 20000, 1, 1);
  DualityCase c;
  c.delta = 0.25;
  c.phi_x = [&e](std::size_t p, std::size_t i) { return 1.0 + e.brownian(p, i, 0); };
  c.phi_y = [&e](std::size_t p, std::size_t) { return 2.0 + e.brownian(p, 16, 0); };
  const DualityReport r = check_duality(c, projector(e), SolveOptions{1e-10, 20, nullptr});
  CHECK(r.backward.converged);
  CHECK(std::abs(r.gap()) <= 3.0 * r.pooled_std_error);
  CHECK(r.verdict);
  for (std::size_t p = 0; p < 100; ++p) {
    for (std::size_t i = 0; i <= g.steps; ++i) CHECK(r.x.at(p, static_cast<std::ptrdiff_t>(i)) == c.phi_x(p, i));
  }
}

TEST_CASE("deterministic kernels match the double quadrature oracle") {
  const TimeGrid g = make_grid(1.0, 0.25, 32);
  const PathEnsemble e = sample_paths(g, 500, 1, 2);
  const std::size_t d = delay_steps(g, 0.25);
  const double h = g.step;
  DualityCase c;
  c.delta = 0.25;
  c.kernels.a1 = [](double t, double s) { return 0.3 * std::cos(t - s); };
  c.kernels.a2 = [](double t, double s) { return 0.2 * (1.0 + s) - 0.1 * t; };
  c.phi_x = [](std::size_t, std::size_t i) { return 1.0 + 0.25 * std::sin(static_cast<double>(i)); };
  c.phi_y = [](std::size_t, std::size_t i) { return 1.0 + 0.5 * static_cast<double>(i) / 32.0; };
  const DualityReport r = check_duality(c, projector(e), SolveOptions{1e-13, 100, nullptr});
  REQUIRE(r.backward.converged);

  const auto x = oracle::forward_delay(g.steps, h, d, [&](std::size_t i) { return c.phi_x(0, i); }, c.kernels.a1,
                                       c.kernels.a2);
  const auto y = oracle::backward_linear(
      g.steps, g.nodes, h, [&](std::size_t i) { return i < g.steps ? c.phi_y(0, i) : 0.0; },
      [&](std::size_t i, std::size_t j) {
        std::vector<std::pair<std::size_t, double>> terms;
        if (j > i) {
          terms.emplace_back(j, c.kernels.a1(g.time(static_cast<std::ptrdiff_t>(j)), g.time(static_cast<std::ptrdiff_t>(i))));
          if (j + d <= g.steps) {
            terms.emplace_back(j + d, c.kernels.a2(g.time(static_cast<std::ptrdiff_t>(j + d)),
                                                   g.time(static_cast<std::ptrdiff_t>(i + d))));
          }
        }
        return terms;
      });
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < g.steps; ++i) {
    lhs += h * c.phi_y(0, i) * x[i];
    rhs += h * c.phi_x(0, i) * y[i];
  }
  CHECK(std::abs(r.lhs - lhs) <= 1e-8 * std::abs(lhs));
  CHECK(std::abs(r.rhs - rhs) <= 1e-8 * std::abs(rhs));
  CHECK(std::abs(r.lhs - r.rhs) <= 1e-8 * std::abs(r.lhs));
  for (std::size_t i = 0; i < g.steps; ++i) CHECK(r.y.mean_y[i] == doctest::Approx(y[i]).epsilon(1e-10));
}

TEST_CASE("both sides are bilinear in the free terms") {
  const TimeGrid g = make_grid(1.0, 0.25, 16);
  const PathEnsemble e = sample_paths(g, 4000, 1, 3);
  const auto proj = projector(e, 2);
  DualityCase c;
  c.delta = 0.25;
  c.kernels.a1 = [](double, double) { return 0.3; };
  c.kernels.a2 = [](double, double) { return 0.2; };
  c.kernels.a3 = [](double, double) { return 0.4; };
  c.phi_x = [](std::size_t, std::size_t) { return 1.0; };
  c.phi_y = [&e](std::size_t p, std::size_t) { return 1.0 + e.brownian(p, 16, 0); };
  const SolveOptions opt{1e-12, 100, nullptr};
  const DualityReport base = check_duality(c, proj, opt);

  DualityCase sx = c;
  sx.phi_x = [](std::size_t, std::size_t) { return 2.5; };
  const DualityReport rx = check_duality(sx, proj, opt);
  CHECK(rx.lhs == doctest::Approx(2.5 * base.lhs).epsilon(1e-9));
  CHECK(rx.rhs == doctest::Approx(2.5 * base.rhs).epsilon(1e-9));

  DualityCase sy = c;
  sy.phi_y = [&](std::size_t p, std::size_t i) { return -3.0 * c.phi_y(p, i); };
  const DualityReport ry = check_duality(sy, proj, opt);
  CHECK(ry.lhs == doctest::Approx(-3.0 * base.lhs).epsilon(1e-9));
  CHECK(ry.rhs == doctest::Approx(-3.0 * base.rhs).epsilon(1e-9));
}

TEST_CASE("swapping the sides flips the gap exactly") {
  DualityReport r;
  r.lhs = 1.2345678901;
  r.rhs = 1.2299999999;
  DualityReport s;
  s.lhs = r.rhs;
  s.rhs = r.lhs;
  CHECK(s.gap() == -r.gap());
}

TEST_CASE("the shifted delay kernel is only queried inside its domain") {
  const TimeGrid g = make_grid(1.0, 0.25, 16);
  const PathEnsemble e = sample_paths(g, 300, 1, 4);
  std::atomic<int> outside{0}, calls{0};
  DualityCase c;
  c.delta = 0.25;
  c.kernels.a1 = [](double, double) { return 0.3; };
  c.kernels.a2 = [&](double t, double s) {
    ++calls;
    if (t > g.horizon + 1e-12 || !(t > s)) ++outside;
    return 0.2;
  };
  c.kernels.a3 = [](double, double) { return 0.4; };
  c.phi_x = [](std::size_t, std::size_t) { return 1.0; };
  c.phi_y = [&e](std::size_t p, std::size_t) { return 1.0 + e.brownian(p, 16, 0); };
  (void)check_duality(c, projector(e, 2), SolveOptions{1e-8, 60, nullptr});
  CHECK(calls.load() > 0);
  CHECK(outside.load() == 0);
}

TEST_CASE("the dual generator declares what it reads") {
  const TimeGrid g = make_grid(1.0, 0.25, 16);
  LinearKernels k{[](double, double) { return 0.3; }, [](double, double) { return 0.2; }, [](double, double) { return 0.4; }};
  const GeneratorSpec spec = dual_generator(k, g, 4);
  CHECK(spec.uses.y);
  CHECK(spec.uses.alpha);
  CHECK(spec.uses.xi);
  CHECK_FALSE(spec.uses.z);
  CHECK(spec.delays.delta == 4);
  CHECK(check_usage_flags(spec, g, 1, 300, 5).violations.empty());
}

TEST_CASE("stochastic identity holds within the statistical allowance") {
  const TimeGrid g = make_grid(1.0, 0.25, 16);
  const PathEnsemble e = sample_paths(g, 20000, 1, 6);
  DualityCase c;
  c.delta = 0.25;
  c.kernels.a1 = [](double, double) { return 0.3; };
  c.kernels.a2 = [](double, double) { return 0.2; };
  c.kernels.a3 = [](double, double) { return 0.4; };
  c.phi_x = [](std::size_t, std::size_t) { return 1.0; };
  c.phi_y = [&e](std::size_t p, std::size_t) { return 1.0 + e.brownian(p, 16, 0); };
  const DualityReport r = check_duality(c, projector(e), SolveOptions{1e-7, 60, nullptr});
  CHECK(r.backward.converged);
  CHECK(r.pooled_std_error > 0.0);
  CHECK(r.bias_allowance == doctest::Approx(5.0 * g.step * std::abs(r.lhs)));
  CHECK(std::abs(r.gap()) <= 3.0 * r.pooled_std_error + r.bias_allowance);
  CHECK(r.verdict);
}
