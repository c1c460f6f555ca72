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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "absvie/absvie_solve.hpp"
#include "absvie/comparison.hpp"
#include "absvie/duality.hpp"
#include "absvie/game_lq.hpp"
#include "absvie/grid_paths.hpp"
#include "absvie/regress.hpp"
#include "absvie/regularity.hpp"
#include "determinism.hpp"
#include "support/oracles.hpp"

using namespace absvie;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<void(Outcome&)> body;
};

// Residuals of the converged solves of criteria 1-3, consumed by criterion 4.
std::vector<std::pair<std::string, double>> g_residuals;

FreeTerm constant_free(double v) {
  FreeTerm f;
  f.phi = [v](std::size_t, std::size_t) { return v; };
  return f;
}

GeneratorSpec constant_generator(double c) {
  GeneratorSpec s;
  s.name = "constant";
  s.g = [c](const GeneratorArgs&) { return c; };
  return s;
}

GeneratorSpec advance_generator(double k, std::size_t d) {
  GeneratorSpec s;
  s.name = "anticipated-y";
  s.uses.alpha = true;
  s.delays.delta = d;
  s.g = [k](const GeneratorArgs& a) { return k * a.alpha; };
  return s;
}

GeneratorSpec average_generator(double k, std::size_t d, double lambda) {
  GeneratorSpec s;
  s.name = "average-y";
  s.uses.mu = true;
  s.lambda = lambda;
  s.delays.delta = d;
  s.g = [k](const GeneratorArgs& a) { return k * a.mu; };
  return s;
}

std::vector<double> advance_oracle(const TimeGrid& g, double k, std::size_t d) {
  return oracle::backward_linear(
      g.steps, g.nodes, g.step, [](std::size_t) { return 1.0; },
      [k, d](std::size_t, std::size_t j) { return std::vector<std::pair<std::size_t, double>>{{j + d, k}}; });
}

std::vector<double> average_oracle(const TimeGrid& g, double k, std::size_t d, double lambda) {
  const double h = g.step;
  return oracle::backward_linear(g.steps, g.nodes, h, [](std::size_t) { return 1.0; },
                                 [k, d, lambda, h](std::size_t, std::size_t j) {
                                   std::vector<std::pair<std::size_t, double>> out;
                                   for (std::size_t l = j; l < j + d; ++l) {
                                     const double w = std::exp(-lambda * h * static_cast<double>(l - j));
                                     out.emplace_back(l, k * h * w);
                                   }
                                   return out;
                                 });
}

double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

// ---------------------------------------------------------------------------

void trivial_closed_form(Outcome& out) {
  const TimeGrid g = make_grid(1.0, 0.25, 32);
  const PathEnsemble ens = sample_paths(g, 20000, 1, 11);
  const double x0 = 1.0, c = 0.5;
  const SolveResult r = solve_absvie(constant_generator(c), constant_free(x0), ens, Basis(3),
                                     SolveOptions{1e-12, 20, nullptr});
  double worst = 0.0;
  for (std::size_t i = 0; i <= g.steps; ++i) {
    const double exact = x0 + c * (g.horizon - g.time(static_cast<std::ptrdiff_t>(i)));
    for (double y : r.solution.y_column(i)) worst = std::max(worst, std::abs(y - exact));
  }
  std::vector<double> zrms, serms;
  std::vector<double> col(ens.paths());
  for (std::size_t i = 0; i <= g.steps; ++i) {
    for (std::size_t j = 0; j < g.steps; ++j) {
      r.solution.z.column(i, j, 0, col);
      double s = 0.0;
      for (double v : col) s += v * v;
      zrms.push_back(std::sqrt(s / static_cast<double>(col.size())));
      serms.push_back(r.solution.z.std_error(i, j, 0));
    }
  }
  const double z_norm = rms(zrms);
  const double z_se = rms(serms);
  out.detail << "iterations=" << r.diagnostics.iterations << " max|Y-exact|=" << worst
             << " rms|Z|=" << z_norm << " rms(se)=" << z_se;
  out.require(r.diagnostics.converged, "solver converged");
  out.require(worst <= 1e-10, "max node error <= 1e-10");
  out.require(z_norm <= 4.0 * z_se, "||Z|| <= 4 standard errors");
  g_residuals.emplace_back("criterion 1", msolution_residual(r.solution));
}

void deterministic_oracles(Outcome& out) {
  const TimeGrid g = make_grid(1.0, 0.25, 32);
  const PathEnsemble ens = sample_paths(g, 20000, 1, 12);
  const std::size_t d = delay_steps(g, 0.25);
  auto proj = std::make_shared<const Projector>(Basis(3), ens);
  const SolveOptions opt{1e-13, 100, nullptr};

  const SolveResult ra = solve_absvie(advance_generator(1.0, d), constant_free(1.0), proj, opt);
  const auto oa = advance_oracle(g, 1.0, d);
  const double ea = oracle::max_relative_error(ra.solution.mean_y, oa, 0, g.steps + 1);

  const SolveResult rm = solve_absvie(average_generator(1.0, d, 1.0), constant_free(1.0), proj, opt);
  const auto om = average_oracle(g, 1.0, d, 1.0);
  const double em = oracle::max_relative_error(rm.solution.mean_y, om, 0, g.steps + 1);

  out.detail << "alpha: iterations=" << ra.diagnostics.iterations << " rel.err=" << ea
             << "; mu: iterations=" << rm.diagnostics.iterations << " rel.err=" << em;
  out.require(ra.diagnostics.converged && rm.diagnostics.converged, "solvers converged");
  out.require(ea <= 1e-8, "alpha oracle within 1e-8");
  out.require(em <= 1e-8, "mu oracle within 1e-8");
  g_residuals.emplace_back("criterion 2 alpha", msolution_residual(ra.solution));
  g_residuals.emplace_back("criterion 2 mu", msolution_residual(rm.solution));
}

void z_reading_closed_form(Outcome& out) {
  const TimeGrid g = make_grid(1.0, 0.25, 32);
  const PathEnsemble ens = sample_paths(g, 50000, 1, 13);
  const double x0 = 1.0, b = 0.5;
  GeneratorSpec spec;
  spec.name = "z-reading";
  spec.uses.z = true;
  spec.g = [](const GeneratorArgs& a) { return a.z[0]; };
  FreeTerm free;
  free.phi = [&ens, x0, b, n = g.steps](std::size_t p, std::size_t) {
    return x0 + b * ens.brownian(p, n, 0);
  };
  const SolveResult r = solve_absvie(spec, free, ens, Basis(3), SolveOptions{1e-8, 50, nullptr});

  double y_err = 0.0;
  for (std::size_t i = 0; i <= g.steps; ++i) {
    const double t = g.time(static_cast<std::ptrdiff_t>(i));
    double num = 0.0, den = 0.0;
    const auto y = r.solution.y_column(i);
    for (std::size_t p = 0; p < ens.paths(); ++p) {
      const double exact = x0 + b * ens.brownian(p, i, 0) + b * (g.horizon - t);
      num += (y[p] - exact) * (y[p] - exact);
      den += exact * exact;
    }
    y_err = std::max(y_err, std::sqrt(num / den));
  }
  std::vector<double> col(ens.paths());
  double upper = 0.0, lower = 0.0;
  std::size_t nu = 0, nl = 0;
  for (std::size_t i = 0; i <= g.steps; ++i) {
    for (std::size_t j = 0; j < g.steps; ++j) {
      r.solution.z.column(i, j, 0, col);
      double s = 0.0;
      for (double v : col) s += std::abs(v - b) / b;
      s /= static_cast<double>(col.size());
      if (j >= i) {
        upper += s;
        ++nu;
      } else {
        lower += s;
        ++nl;
      }
    }
  }
  upper /= static_cast<double>(nu);
  lower /= static_cast<double>(nl);
  out.detail << "iterations=" << r.diagnostics.iterations << " max node rel.L2(Y)=" << y_err
             << " mean rel|Z-b| upper=" << upper << " lower=" << lower;
  out.require(r.diagnostics.converged, "solver converged");
  out.require(y_err <= 0.05, "Y within 5%");
  out.require(upper <= 0.05 && lower <= 0.05, "Z mean error within 5%");
  g_residuals.emplace_back("criterion 3", msolution_residual(r.solution));
}

void m_relation(Outcome& out) {
  out.require(g_residuals.size() == 4, "criteria 1-3 produced their solves");
  for (const auto& [name, res] : g_residuals) {
    out.detail << name << "=" << res << " ";
    out.require(res <= 0.05, name + " residual <= 0.05");
  }
}

void contraction(Outcome& out) {
  const TimeGrid g = make_grid(1.0, 0.25, 32);
  const PathEnsemble ens = sample_paths(g, 20000, 1, 15);
  const std::size_t d = delay_steps(g, 0.25);
  auto proj = std::make_shared<const Projector>(Basis(3), ens);
  const SolveOptions opt{1e-12, 100, nullptr};
  const std::vector<std::pair<std::string, GeneratorSpec>> cases{
      {"alpha", advance_generator(0.25, d)}, {"mu", average_generator(0.25, d, 1.0)}};
  for (const auto& [name, spec] : cases) {
    const SolveResult r = solve_absvie(spec, constant_free(1.0), proj, opt);
    const auto& ratios = r.diagnostics.ratios;
    double worst = 0.0;
    for (std::size_t k = 1; k < ratios.size(); ++k) worst = std::max(worst, ratios[k]);
    out.detail << name << ": iterations=" << r.diagnostics.iterations << " max ratio after it.2="
               << worst << "; ";
    out.require(r.diagnostics.converged, name + " converged");
    out.require(ratios.size() >= 2, name + " has ratios past iteration 2");
    out.require(worst < 0.7, name + " ratios < 0.7");
  }
}

void comparison_theorem(Outcome& out) {
  const TimeGrid g = make_grid(1.0, 0.25, 32);
  const std::size_t d = delay_steps(g, 0.25);
  const SolveOptions opt{1e-13, 100, nullptr};
  {
    const PathEnsemble ens = sample_paths(g, 2000, 1, 16);
    auto proj = std::make_shared<const Projector>(Basis(3), ens);
    ComparisonCase c;
    c.g1 = advance_generator(0.2, d);
    c.g2 = advance_generator(0.4, d);
    c.gbar = advance_generator(0.3, d);
    c.phi1 = constant_free(1.0);
    c.phi2 = constant_free(1.0);
    c.declared.alpha_min = 0.0;
    const OrderingReport rep = run_comparison(c, proj, opt);
    const auto o1 = advance_oracle(g, 0.2, d);
    const auto o2 = advance_oracle(g, 0.4, d);
    double margin_err = 0.0;
    for (std::size_t i = 0; i <= g.steps; ++i) {
      margin_err = std::max(margin_err, std::abs(rep.mean_margin[i] - (o2[i] - o1[i])));
      margin_err = std::max(margin_err, std::abs(rep.worst_margin[i] - (o2[i] - o1[i])));
    }
    out.detail << "deterministic: exact violations=" << rep.exact_violations
               << " margin err=" << margin_err << "; ";
    out.require(rep.exact_violations == 0, "deterministic pair has zero violations");
    out.require(margin_err <= 1e-10, "deterministic margins match oracle to 1e-10");
  }
  {
    const PathEnsemble ens = sample_paths(g, 50000, 1, 17);
    auto proj = std::make_shared<const Projector>(Basis(3), ens);
    auto make = [d](double c0) {
      GeneratorSpec s;
      s.name = "affine";
      s.uses.z = s.uses.alpha = s.uses.mu = true;
      s.lambda = 1.0;
      s.delays.delta = d;
      s.g = [c0](const GeneratorArgs& a) { return c0 + 0.5 * a.alpha + 0.2 * a.z[0] + 0.3 * a.mu; };
      return s;
    };
    ComparisonCase c;
    c.g1 = make(0.0);
    c.gbar = make(0.25);
    c.g2 = make(0.5);
    FreeTerm phi;
    phi.phi = [&ens, n = g.steps](std::size_t p, std::size_t i) {
      return 1.0 + ens.brownian(p, std::max(i, n), 0);
    };
    c.phi1 = phi;
    c.phi2 = phi;
    const OrderingReport rep = run_comparison(c, proj, SolveOptions{1e-8, 60, nullptr});
    out.detail << "stochastic: iterations=" << rep.first.iterations << "/" << rep.second.iterations
               << " max violation fraction=" << rep.max_violation_fraction
               << " min mean margin=" << *std::min_element(rep.mean_margin.begin(), rep.mean_margin.end() - 1);
    out.require(rep.first.converged && rep.second.converged, "stochastic solves converged");
    out.require(rep.passed(1e-3), "violation fraction <= 1e-3");
  }
}

void duality_identity(Outcome& out) {
  const double delta = 0.25;
  {
    const TimeGrid g = make_grid(1.0, delta, 32);
    const PathEnsemble ens = sample_paths(g, 1000, 1, 18);
    DualityCase c;
    c.kernels.a1 = [](double, double) { return 0.3; };
    c.kernels.a2 = [](double, double) { return 0.2; };
    c.phi_x = [](std::size_t, std::size_t) { return 1.0; };
    c.phi_y = [](std::size_t, std::size_t i) { return 1.0 + 0.5 * static_cast<double>(i) / 32.0; };
    c.delta = delta;
    auto proj = std::make_shared<const Projector>(Basis(3), ens);
    const DualityReport rep = check_duality(c, proj, SolveOptions{1e-13, 100, nullptr});
    const std::size_t d = delay_steps(g, delta);
    const double h = g.step;
    auto phi_y = [&g](std::size_t i) { return 1.0 + 0.5 * static_cast<double>(i) / static_cast<double>(g.steps); };
    const auto x = oracle::forward_delay(g.steps, h, d, [](std::size_t) { return 1.0; },
                                         c.kernels.a1, c.kernels.a2);
    const auto y = oracle::backward_linear(
        g.steps, g.nodes, h, [&](std::size_t i) { return i < g.steps ? phi_y(i) : 0.0; },
        [d, n = g.steps](std::size_t i, std::size_t j) {
          std::vector<std::pair<std::size_t, double>> t;
          if (j > i) {
            t.emplace_back(j, 0.3);
            if (j + d <= n) t.emplace_back(j + d, 0.2);
          }
          return t;
        });
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < g.steps; ++i) {
      lhs += h * phi_y(i) * x[i];
      rhs += h * 1.0 * y[i];
    }
    const double el = std::abs(rep.lhs - lhs) / std::abs(lhs);
    const double er = std::abs(rep.rhs - rhs) / std::abs(rhs);
    out.detail << "deterministic: lhs=" << rep.lhs << " rhs=" << rep.rhs << " rel.err " << el << "/"
               << er << "; ";
    out.require(rep.backward.converged, "deterministic backward solve converged");
    out.require(el <= 1e-8 && er <= 1e-8, "deterministic sides match oracle to 1e-8");
  }
  {
    const TimeGrid fine = make_grid(1.0, delta, 64);
    const PathEnsemble ens64 = sample_paths(fine, 100000, 1, 19);
    DualityCase c;
    c.kernels.a1 = [](double, double) { return 0.3; };
    c.kernels.a2 = [](double, double) { return 0.2; };
    c.kernels.a3 = [](double, double) { return 0.4; };
    c.phi_x = [](std::size_t, std::size_t) { return 1.0; };
    c.delta = delta;
    const SolveOptions opt{1e-7, 60, nullptr};
    std::vector<double> gaps;
    bool verdict32 = false;
    for (std::size_t factor : {4u, 2u, 1u}) {
      const PathEnsemble ens = factor == 1 ? ens64 : ens64.coarsen(factor);
      const std::size_t n = ens.grid().steps;
      c.phi_y = [&ens, n](std::size_t p, std::size_t) { return 1.0 + ens.brownian(p, n, 0); };
      auto proj = std::make_shared<const Projector>(Basis(3), ens);
      const DualityReport rep = check_duality(c, proj, opt);
      gaps.push_back(rep.gap());
      out.detail << "N=" << n << ": gap=" << rep.gap() << " se=" << rep.pooled_std_error
                 << " it=" << rep.backward.iterations << (rep.verdict ? " pass" : " fail") << "; ";
      out.require(rep.backward.converged, "stochastic backward solve converged");
      if (n == 32) verdict32 = rep.verdict;
    }
    const double r1 = gaps[1] / gaps[0];
    const double r2 = gaps[2] / gaps[1];
    out.detail << "bias ratios " << r1 << ", " << r2;
    out.require(verdict32, "paired 3-standard-error verdict at N=32");
    out.require(r1 >= 0.3 && r1 <= 0.7 && r2 >= 0.3 && r2 <= 0.7, "bias ratio in [0.3, 0.7]");
  }
}

void regularity_representation(Outcome& out) {
  const TimeGrid g = make_grid(1.0, 0.0, 32);
  const PathEnsemble ens = sample_paths(g, 50000, 1, 20);
  const SolveOptions opt{1e-10, 80, nullptr};
  {
    LinearRegularityCase c;
    c.f = [](double t) { return 1.0 + t; };
    c.x0 = 1.0;
    auto proj = regularity_projector(c, ens);
    const SolveResult base = solve_base(c, proj, opt);
    double worst = 0.0;
    for (std::size_t r : {0u, 8u, 16u, 24u, 31u}) {
      const SolveResult der = solve_derivative(c, r, proj, opt);
      worst = std::max(worst, check_representation(base.solution, der.solution, r).max_error);
    }
    out.detail << "g=0: max error=" << worst << "; ";
    out.require(worst <= 0.05, "g=0 representation error <= 0.05");
  }
  {
    const double a = 0.5;
    LinearRegularityCase c;
    c.k_y = [a](double, double) { return a; };
    c.f = [](double t) { return 1.0 + t; };
    c.x0 = 1.0;
    auto proj = regularity_projector(c, ens);
    const SolveResult base = solve_base(c, proj, opt);
    std::size_t good = 0;
    double worst = 0.0, worst_dy = 0.0;
    for (std::size_t r : {0u, 4u, 8u, 12u, 16u, 20u, 24u}) {
      const SolveResult der = solve_derivative(c, r, proj, opt);
      const auto rep = check_representation(base.solution, der.solution, r);
      const auto d = oracle::derivative_recursion(g.steps, g.nodes, g.step, a,
                                                  c.f(g.time(static_cast<std::ptrdiff_t>(r))), r);
      double err = 0.0, err_dy = 0.0;
      for (std::size_t i = r + 1; i <= g.steps; ++i) {
        err = std::max(err, std::abs(rep.z[i - r - 1] - d[i]) / std::abs(d[i]));
        err_dy = std::max(err_dy, std::abs(der.solution.mean_y[i] - d[i]) / std::abs(d[i]));
      }
      worst = std::max(worst, err);
      worst_dy = std::max(worst_dy, err_dy);
      if (err <= 0.1 && rep.max_error <= 0.1) ++good;
    }
    out.detail << "a1=0.5: nodes within 10%=" << good << "/7 max Z err=" << worst
               << " max D_rY err=" << worst_dy;
    out.require(good >= 5, "at least 5 r nodes within 10% of the oracle");
    out.require(worst_dy <= 1e-8, "derivative solve matches the recursion to 1e-8");
  }
}

TimeFn constant_fn(double v) {
  return [v](double) { return v; };
}
Kernel constant_kernel(double v) {
  return [v](double, double) { return v; };
}

PlayerSpec silent_player() {
  PlayerSpec p;
  p.b = p.c = p.bt = constant_kernel(0.0);
  p.q = p.qt = p.rt = constant_fn(0.0);
  p.r = constant_fn(1.0);
  return p;
}

LQGameSpec coupled_game() {
  LQGameSpec s;
  s.a1 = constant_kernel(0.2);
  s.a2 = constant_kernel(0.1);
  s.at1 = constant_kernel(0.2);
  s.delta = 0.25;
  s.phi = [](std::size_t, std::ptrdiff_t) { return 1.0; };
  PlayerSpec p1;
  p1.b = constant_kernel(1.0);
  p1.c = constant_kernel(0.3);
  p1.bt = constant_kernel(0.2);
  p1.q = constant_fn(1.0);
  p1.qt = constant_fn(0.5);
  p1.r = constant_fn(1.0);
  p1.rt = constant_fn(0.5);
  p1.delay = 0.25;
  PlayerSpec p2;
  p2.b = constant_kernel(-0.8);
  p2.c = constant_kernel(0.2);
  p2.bt = constant_kernel(0.1);
  p2.q = constant_fn(0.5);
  p2.qt = constant_fn(0.5);
  p2.r = constant_fn(1.5);
  p2.rt = constant_fn(0.5);
  p2.delay = 0.25;
  s.players = {p1, p2};
  return s;
}

void lq_nash(Outcome& out) {
  const TimeGrid g = make_grid(1.0, 0.25, 32);
  const PathEnsemble ens = sample_paths(g, 20000, 1, 21);
  {
    LQGameSpec decoupled = coupled_game();
    for (auto& p : decoupled.players) p.b = p.c = p.bt = constant_kernel(0.0);
    LQGameSpec zero_cost = coupled_game();
    for (auto& p : zero_cost.players) p.q = p.qt = constant_fn(0.0);
    for (const auto* spec : {&decoupled, &zero_cost}) {
      const NashResult r = solve_nash(*spec, ens, NashOptions{});
      double umax = 0.0;
      for (const auto& u : r.iterate.u)
        for (double v : u.values()) umax = std::max(umax, std::abs(v));
      out.detail << (spec == &decoupled ? "decoupled" : "zero-cost") << ": iterations="
                 << r.diagnostics.iterations << " max|u|=" << umax << "; ";
      out.require(r.diagnostics.converged && r.diagnostics.iterations <= 2 && umax == 0.0,
                  "degenerate case converges to zero in <= 2 iterations");
    }
  }
  {
    const TimeGrid g0 = make_grid(1.0, 0.0, 32);
    const PathEnsemble ens0 = sample_paths(g0, 500, 1, 22);
    LQGameSpec s;
    s.a1 = [](double t, double u) { return 0.3 * std::cos(t - u); };
    s.a2 = s.at1 = constant_kernel(0.0);
    s.phi = [](std::size_t, std::ptrdiff_t) { return 1.0; };
    PlayerSpec p1 = silent_player();
    p1.b = [](double t, double u) { return 1.0 - 0.5 * (t - u); };
    p1.q = [](double t) { return 1.0 + t; };
    p1.r = constant_fn(0.5);
    s.players = {p1, silent_player()};
    NashOptions opt;
    opt.tol = 1e-12;
    opt.max_iter = 400;
    opt.adjoint = SolveOptions{1e-14, 100, nullptr};
    const NashResult r = solve_nash(s, ens0, opt);
    const auto u = oracle::lq_minimizer(g0.steps, g0.step, 1.0, s.a1, p1.b, p1.q, p1.r);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < g0.steps; ++k) {
      const double got = r.iterate.u[0].at(0, static_cast<std::ptrdiff_t>(k));
      num += (got - u[k]) * (got - u[k]);
      den += u[k] * u[k];
    }
    const double err = std::sqrt(num / den);
    out.detail << "QP oracle: iterations=" << r.diagnostics.iterations << " rel.L2 err=" << err << "; ";
    out.require(r.diagnostics.converged, "deterministic game converged");
    out.require(err <= 1e-6, "QP oracle within 1e-6");
  }
  {
    const LQGameSpec s = coupled_game();
    NashOptions opt;
    const NashResult r = solve_nash(s, ens, opt);
    const StationarityReport st = stationarity_residual(s, g, r.iterate, r.adjoints);
    out.detail << "coupled: iterations=" << r.diagnostics.iterations
               << " final cycle=" << r.diagnostics.final_cycle_distance << " stationarity="
               << st.max_residual[0] << "/" << st.max_residual[1] << " (se " << st.max_std_error[0]
               << "/" << st.max_std_error[1] << ")";
    out.require(r.diagnostics.converged, "coupled game converged");
    for (std::size_t i = 0; i < 2; ++i) {
      out.require(st.max_residual[i] <= std::max(1e-3, 3.0 * st.max_std_error[i]),
                  "stationarity residual player " + std::to_string(i + 1));
    }
    const std::size_t hist = g.anticipation_steps();
    std::vector<ControlPath> dirs(3, ControlPath(hist, g.steps, ens.paths()));
    for (std::size_t k = 0; k <= g.steps; ++k) {
      for (std::size_t p = 0; p < ens.paths(); ++p) {
        const auto node = static_cast<std::ptrdiff_t>(k);
        dirs[0].at(p, node) = 1.0;
        dirs[1].at(p, node) = g.time(node);
        dirs[2].at(p, node) = ens.brownian(p, k, 0);
      }
    }
    const auto rows = perturbation_check(s, r, dirs, {0.05, 0.1, 0.2}, ens);
    double worst = 1e300;
    for (const auto& row : rows) {
      const double z = row.std_error > 0.0 ? row.delta_j / row.std_error : row.delta_j >= 0 ? 1e300 : -1e300;
      worst = std::min(worst, z);
      out.require(row.delta_j >= -3.0 * row.std_error, "perturbation dJ >= -3 se");
    }
    out.detail << " perturbations=" << rows.size() << " min dJ/se=" << worst;
    out.require(rows.size() == 18, "3 directions x 3 epsilons x 2 players");
  }
}

void determinism(Outcome& out) {
  const acceptance::DeterminismReport rep = acceptance::rerun_configs({1, 2, 3});
  out.detail << rep.summary;
  out.require(rep.runs > 0, "configs were rerun");
  out.require(rep.mismatches == 0, "byte-identical CSV outputs");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));
  const std::vector<Criterion> criteria{
      {1, "trivial ABSVIE closed form", 10.0, trivial_closed_form},
      {2, "deterministic anticipated oracles", 60.0, deterministic_oracles},
      {3, "Z-reading closed form", 120.0, z_reading_closed_form},
      {4, "M-relation residual", 1.0, m_relation},
      {5, "contraction diagnostics", 60.0, contraction},
      {6, "comparison ordering", 120.0, comparison_theorem},
      {7, "duality identity", 300.0, duality_identity},
      {8, "regularity representation", 300.0, regularity_representation},
      {9, "LQ Nash equilibrium", 600.0, lq_nash},
      {10, "determinism across thread counts", 600.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      out.pass = false;
      out.detail << " [over runtime budget " << c.budget_seconds << " s]";
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion %d: %s (%.1f s) %s\n", out.pass ? "PASS" : "FAIL", c.id, c.title, secs,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
