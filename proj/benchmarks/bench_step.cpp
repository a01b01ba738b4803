// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bioflux/coupler.hpp"
#include "bioflux/diagnostics.hpp"
#include "bioflux/io.hpp"

namespace {

using namespace bioflux;

ModelParams bench_model() {
  ModelParams p;
  p.m = 2.0;
  p.chi = SensitivitySpec::constant(0.5);
  p.k = ConsumptionSpec::linear(1.0);
  p.f = GrowthSpec::fisher(1.0);
  p.phi = PotentialSpec::gravity(0.3);
  return p;
}

SimState bench_state(int N) {
  ScenarioSpec sc;
  sc.name = "tuval_plume";
  return make_scenario(sc, Grid(N, N, 1.0, 1.0), bench_model());
}

void BM_CoupledStep(benchmark::State& state) {
  int N = int(state.range(0));
  ModelParams params = bench_model();
  RunConfig cfg;
  SimState s = bench_state(N);
  // warm up past the initial transient so dt is representative
  for (int k = 0; k < 3; ++k) s = step(s, params, cfg);
  for (auto _ : state) {
    SimState next = step(s, params, cfg);
    benchmark::DoNotOptimize(next.n.v.data());
  }
  state.SetItemsProcessed(state.iterations() * N * N);
}
BENCHMARK(BM_CoupledStep)->Arg(32)->Arg(64)->Arg(128);

void BM_PoissonSolve(benchmark::State& state) {
  int N = int(state.range(0));
  Grid g(N, N, 1.0, 1.0);
  ScalarField rhs(g);
  std::uint64_t seed = 5;
  for (double& x : rhs.v) x = 2.0 * splitmix64_unit(seed) - 1.0;
  double mean = integrate(rhs) / (g.Lx * g.Ly);
  for (double& x : rhs.v) x -= mean;
  for (auto _ : state) {
    SpdSolution sol = solve_poisson(rhs, 1e-10, 10000);
    benchmark::DoNotOptimize(sol.x.v.data());
  }
}
BENCHMARK(BM_PoissonSolve)->Arg(64)->Arg(128)->Arg(256);

void BM_Diagnostics(benchmark::State& state) {
  int N = int(state.range(0));
  ModelParams params = bench_model();
  SimState s = bench_state(N);
  for (auto _ : state) {
    DiagRecord r = record(s, params, 1e-3);
    benchmark::DoNotOptimize(&r);
  }
}
BENCHMARK(BM_Diagnostics)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
