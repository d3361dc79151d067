#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "wellpose/stencil.hpp"

using namespace wellpose;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField2D smooth_field(GridPtr g) {
  ScalarField2D f(g);
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i)
      f(i, j) = std::sin(2.0 * pi * g->x(i)) * g->y(j) * (1.0 - g->y(j));
  return f;
}

VectorField2D smooth_vector(GridPtr g) {
  VectorField2D v(g);
  v.ux = smooth_field(g);
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i)
      v.uy(i, j) = std::cos(4.0 * pi * g->x(i)) * g->y(j);
  return v;
}

}  // namespace

static void BM_Gradient(benchmark::State& state) {
  const int n = int(state.range(0));
  auto g = make_grid(n, n, 1.0, 1.0);
  const ScalarField2D f = smooth_field(g);
  VectorField2D out(g);
  for (auto _ : state) {
    gradient_into(f, out);
    benchmark::DoNotOptimize(out.ux.values().data());
  }
  state.SetItemsProcessed(state.iterations() * g->size());
}
BENCHMARK(BM_Gradient)->Arg(64)->Arg(256);

static void BM_Divergence(benchmark::State& state) {
  const int n = int(state.range(0));
  auto g = make_grid(n, n, 1.0, 1.0);
  const VectorField2D v = smooth_vector(g);
  ScalarField2D out(g);
  for (auto _ : state) {
    divergence_into(v, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * g->size());
}
BENCHMARK(BM_Divergence)->Arg(64)->Arg(256);

static void BM_Laplacian(benchmark::State& state) {
  const int n = int(state.range(0));
  auto g = make_grid(n, n, 1.0, 1.0);
  const ScalarField2D f = smooth_field(g);
  ScalarField2D out(g);
  for (auto _ : state) {
    laplacian_into(f, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * g->size());
}
BENCHMARK(BM_Laplacian)->Arg(64)->Arg(256);

static void BM_CurlOfCurl(benchmark::State& state) {
  const int n = int(state.range(0));
  auto g = make_grid(n, n, 1.0, 1.0);
  const VectorField2D v = smooth_vector(g);
  for (auto _ : state) {
    VectorField2D out = curl_of_curl(v);
    benchmark::DoNotOptimize(out.ux.values().data());
  }
  state.SetItemsProcessed(state.iterations() * g->size());
}
BENCHMARK(BM_CurlOfCurl)->Arg(64)->Arg(256);

static void BM_Integrate(benchmark::State& state) {
  const int n = int(state.range(0));
  auto g = make_grid(n, n, 1.0, 1.0);
  const ScalarField2D f = smooth_field(g);
  for (auto _ : state) {
    double total = integrate(f);
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * g->size());
}
BENCHMARK(BM_Integrate)->Arg(64)->Arg(256);
