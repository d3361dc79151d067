#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "wellpose/steady_bench.hpp"
#include "wellpose/stencil.hpp"
#include "wellpose/time_reversal.hpp"

using namespace wellpose;

namespace {

constexpr double pi = std::numbers::pi;

FluidParams channel_params() {
  FluidParams p;
  p.mu = 1.0;
  p.lambda = 0.0;
  p.rho0 = 1.0;
  p.cs = 2.5;
  return p;
}

SimState perturbed_state(GridPtr g, const FluidParams& params) {
  const SteadyBenchmark bench = make_poiseuille(1.0, -2.0, g->ly());
  SimState state = as_initial_state(bench, g, params);
  for (int j = 1; j < g->ny() - 1; ++j) {
    const double y = g->y(j);
    for (int i = 0; i < g->nx(); ++i)
      state.vel.ux(i, j) +=
          2.5e-3 * std::sin(4.0 * pi * g->x(i)) * y * (1.0 - y) * 4.0;
  }
  return state;
}

}  // namespace

static void BM_Rhs(benchmark::State& state) {
  const int n = int(state.range(0));
  auto g = make_grid(n, n, 1.0, 1.0);
  FluidParams params = channel_params();
  params.fx = 2.0;
  const SimState sim = perturbed_state(g, params);
  Rates out(g);
  ScalarField2D scratch(g);
  for (auto _ : state) {
    rhs_into(sim, params, out, scratch);
    benchmark::DoNotOptimize(out.drho.values().data());
  }
  state.SetItemsProcessed(state.iterations() * g->size());
}
BENCHMARK(BM_Rhs)->Arg(48)->Arg(64)->Arg(128);

static void BM_Rk4Step(benchmark::State& state) {
  const int n = int(state.range(0));
  auto g = make_grid(n, n, 1.0, 1.0);
  FluidParams params = channel_params();
  params.fx = 2.0;
  SimState sim = perturbed_state(g, params);
  Rk4Stepper stepper(g);
  const double dt = stable_dt(sim, params, 0.9);
  for (auto _ : state) {
    sim = stepper.step(sim, params, dt);
    benchmark::DoNotOptimize(sim.rho.values().data());
  }
  state.SetItemsProcessed(state.iterations() * g->size());
}
BENCHMARK(BM_Rk4Step)->Arg(48)->Arg(64)->Arg(128);

static void BM_StableDt(benchmark::State& state) {
  auto g = make_grid(64, 64, 1.0, 1.0);
  const FluidParams params = channel_params();
  const SimState sim = perturbed_state(g, params);
  for (auto _ : state) {
    double dt = stable_dt(sim, params, 0.9);
    benchmark::DoNotOptimize(dt);
  }
}
BENCHMARK(BM_StableDt);

static void BM_Diagnostics(benchmark::State& state) {
  auto g = make_grid(64, 64, 1.0, 1.0);
  const FluidParams params = channel_params();
  const SimState sim = perturbed_state(g, params);
  const VectorField2D ref = sampled_profile(make_poiseuille(1.0, -2.0, 1.0), g);
  for (auto _ : state) {
    Diagnostics d = compute_diagnostics(sim, params, &ref);
    benchmark::DoNotOptimize(d.kinetic_energy);
  }
}
BENCHMARK(BM_Diagnostics);

static void BM_SolveDecomposition(benchmark::State& state) {
  const SteadyBenchmark bench = make_poiseuille(1.0, -2.0, 1.0);
  const ReversedPoiseuilleProblem prob = reversed_poiseuille(bench, 65, 2);
  for (auto _ : state) {
    DecompositionSolution sol =
        solve_decomposition(prob, 0.9, 1.0, 1e4, int(state.range(0)));
    benchmark::DoNotOptimize(sol.j_inf_numeric.data());
  }
}
BENCHMARK(BM_SolveDecomposition)->Arg(4000)->Arg(40000);
