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

#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "absvie/absvie_solve.hpp"
#include "absvie/grid_paths.hpp"
#include "absvie/parallel.hpp"
#include "absvie/reference.hpp"
#include "absvie/regress.hpp"
#include "absvie/sdvie_sim.hpp"

using namespace absvie;

namespace {

std::vector<double> column(const PathEnsemble& e, std::size_t node) {
  std::vector<double> v(e.paths());
  for (std::size_t p = 0; p < e.paths(); ++p) v[p] = e.brownian(p, node, 0);
  return v;
}

SDVIECoeffs coeffs() {
  SDVIECoeffs c;
  c.drift = [](const TimePair& tp, const StateArgs& a) {
    return std::cos(tp.t - tp.s) * std::sin(a.x) + 0.3 * a.x_delay + 0.5 * a.u1 - 0.2 * a.u2_delay;
  };
  c.diffusion = [](const TimePair& tp, double x, double u1, double u2) {
    return 0.2 + 0.1 * std::exp(-(tp.t - tp.s)) * x + 0.05 * (u1 - u2);
  };
  return c;
}

struct SimSetup {
  TimeGrid grid;
  PathEnsemble ens;
  ControlPath u1, u2;
  SDVIEDelays delays{4, 3, 6};
  HistorySpec hist{[](std::size_t, std::ptrdiff_t i) { return 1.0 - 0.02 * static_cast<double>(i); }};

  explicit SimSetup(std::size_t paths)
      : grid(make_grid(1.0, 0.0, 32)),
        ens(sample_paths(grid, paths, 1, 10)),
        u1(3, grid.steps, paths),
        u2(6, grid.steps, paths) {
    for (std::size_t p = 0; p < paths; ++p) {
      for (std::ptrdiff_t i = -3; i <= 32; ++i) u1.at(p, i) = std::sin(0.1 * static_cast<double>(i));
    }
  }
};

struct SolveSetup {
  TimeGrid grid;
  PathEnsemble ens;
  std::shared_ptr<const Projector> proj;
  GeneratorSpec spec;
  FreeTerm free;
  MSolution iterate;

  explicit SolveSetup(std::size_t paths)
      : grid(make_grid(1.0, 0.25, 16)),
        ens(sample_paths(grid, paths, 1, 15)),
        proj(std::make_shared<const Projector>(Basis(3), ens)) {
    spec.name = "all";
    spec.uses = UsageFlags::all();
    spec.lambda = 0.5;
    spec.delays.delta = 4;
    spec.delays.zeta = 2;
    spec.g = [](const GeneratorArgs& a) {
      return 0.1 * std::sin(a.y) + 0.1 * a.z[0] + 0.05 * a.xi[0] + 0.1 * a.alpha + 0.05 * a.beta[0] +
             0.05 * a.gamma[0] + 0.1 * a.mu + 0.05 * a.nu[0] + 0.05 * a.psi[0];
    };
    const std::size_t n = grid.steps;
    const PathEnsemble* e = &ens;
    free.phi = [e, n](std::size_t p, std::size_t i) { return 1.0 + 0.4 * e->brownian(p, std::max(i, n), 0); };
    iterate = initial_iterate(spec, free, proj);
    iterate = picard_step(iterate, spec, free, proj);
  }
};

void BM_project_parallel(benchmark::State& state) {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, static_cast<std::size_t>(state.range(0)), 1, 11);
  std::vector<double> v = column(e, 8);
  for (double& x : v) x = std::cos(x);
  for (auto _ : state) benchmark::DoNotOptimize(project(v, 5, Basis(3), e));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_project_reference(benchmark::State& state) {
  const TimeGrid g = make_grid(1.0, 0.0, 8);
  const PathEnsemble e = sample_paths(g, static_cast<std::size_t>(state.range(0)), 1, 11);
  std::vector<double> v = column(e, 8);
  for (double& x : v) x = std::cos(x);
  const std::vector<std::vector<double>> vars{column(e, 5)};
  for (auto _ : state) benchmark::DoNotOptimize(reference::project(v, vars, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_simulate_parallel(benchmark::State& state) {
  const SimSetup s(static_cast<std::size_t>(state.range(0)));
  const SDVIECoeffs c = coeffs();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_sdvie(c, s.hist, s.u1, s.u2, s.delays, s.ens));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_simulate_reference(benchmark::State& state) {
  const SimSetup s(static_cast<std::size_t>(state.range(0)));
  const SDVIECoeffs c = coeffs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::simulate_sdvie(c, s.hist, s.u1, s.u2, s.delays, s.ens));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

CostFn quadratic_cost() {
  return [](std::size_t, double t, const StateArgs& a) {
    return 0.5 * (1.0 + t) * a.x * a.x + 0.3 * a.x_delay * a.u1 + 0.25 * a.u2_delay * a.u2_delay;
  };
}

void BM_performance_parallel(benchmark::State& state) {
  const SimSetup s(static_cast<std::size_t>(state.range(0)));
  const StatePath x = simulate_sdvie(coeffs(), s.hist, s.u1, s.u2, s.delays, s.ens);
  const CostFn cost = quadratic_cost();
  for (auto _ : state) benchmark::DoNotOptimize(performance(cost, x, s.u1, s.u2, s.delays, s.grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_performance_reference(benchmark::State& state) {
  const SimSetup s(static_cast<std::size_t>(state.range(0)));
  const StatePath x = simulate_sdvie(coeffs(), s.hist, s.u1, s.u2, s.delays, s.ens);
  const CostFn cost = quadratic_cost();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::performance(cost, x, s.u1, s.u2, s.delays, s.grid));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_accumulate_row_parallel(benchmark::State& state) {
  const SolveSetup s(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_row(s.iterate, s.spec, s.free, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_accumulate_row_reference(benchmark::State& state) {
  const SolveSetup s(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::accumulate_row(s.iterate, s.spec, s.free, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_project_parallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_project_reference)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_parallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_reference)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_performance_parallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_performance_reference)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_accumulate_row_parallel)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_accumulate_row_reference)->Arg(5000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::AddCustomContext("omp_max_threads", std::to_string(par::max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
