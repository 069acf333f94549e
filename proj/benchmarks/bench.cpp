#include <benchmark/benchmark.h>

#include "halfmom/moment_system.hpp"
#include "halfmom/solver.hpp"
#include "halfmom/subspace.hpp"

using namespace halfmom;

static void BM_BuildFull3d(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto sys = build_full3d(M, 1.0);
    benchmark::DoNotOptimize(sys.A.data());
  }
}
BENCHMARK(BM_BuildFull3d)->Arg(3)->Arg(5)->Arg(7)->Arg(9);

static void BM_Decomposition(benchmark::State& state) {
  const auto sys = build_full3d(static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) {
    auto dec = build_decomposition(sys);
    benchmark::DoNotOptimize(dec.V3.data());
  }
}
BENCHMARK(BM_Decomposition)->Arg(3)->Arg(5)->Arg(7);

static void BM_Spectral(benchmark::State& state) {
  const auto sys = build_full3d(static_cast<int>(state.range(0)), 1.0);
  const auto dec = build_decomposition(sys);
  for (auto _ : state) {
    auto spec = spectral_factorization(dec);
    benchmark::DoNotOptimize(spec.T.data());
  }
}
BENCHMARK(BM_Spectral)->Arg(3)->Arg(5)->Arg(7);

static void BM_Solve(benchmark::State& state) {
  const auto sys = build_full3d(static_cast<int>(state.range(0)), 1.0);
  const auto dec = build_decomposition(sys);
  const auto spec = spectral_factorization(dec);
  ExpPolyVec h(sys.size());
  for (int i = 0; i < sys.size(); ++i)
    h.add_component_term(i, 1.0 + 0.01 * i, {1.0, 0.5});
  // B T+ = I: guaranteed solvable for any g
  const Eigen::MatrixXd B = spec.Tplus().transpose() * dec.Q33;
  const Eigen::VectorXd g = Eigen::VectorXd::Random(spec.n_plus);
  for (auto _ : state) {
    auto sol = solve(sys, dec, spec, B, g, h, 0.25);
    benchmark::DoNotOptimize(sol.residual_sup);
  }
}
BENCHMARK(BM_Solve)->Arg(3)->Arg(5);

BENCHMARK_MAIN();
