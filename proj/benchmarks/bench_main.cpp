#include <benchmark/benchmark.h>

#include "bbmlab/approx.hpp"
#include "bbmlab/collision.hpp"
#include "bbmlab/integrator.hpp"
#include "bbmlab/omega.hpp"
#include "bbmlab/operator_l.hpp"
#include "bbmlab/soliton.hpp"

using namespace bbm;

static void BM_SpectralDerivative(benchmark::State& st) {
  const Grid g = Grid::periodic(400.0, static_cast<int>(st.range(0)));
  const auto f = phi_c(2.0, g);
  for (auto _ : st) benchmark::DoNotOptimize(derivative(f, 1));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_SpectralDerivative)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

static void BM_SolverStep(benchmark::State& st) {
  const Grid g = Grid::periodic(800.0, static_cast<int>(st.range(0)));
  IntegratorConfig cfg;
  cfg.dt = 0.005;
  cfg.frame_speed = st.range(1) ? 1.1 : 0.0;
  BBMSolver solver(g, cfg);
  EvolutionState s{phi_c(2.0, g) + phi_c(1.1, g, 60.0), 0.0, cfg.dt, 0};
  for (auto _ : st) solver.step(s);
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_SolverStep)->ArgsProduct({{4096, 16384}, {0, 1}})->ArgNames({"n", "moving"});

static void BM_InvertL(benchmark::State& st) {
  const Grid g = Grid::line(60.0, static_cast<int>(st.range(0)));
  OperatorL L(g);
  const auto h = q_profile(g) * q_profile(g);
  for (auto _ : st) benchmark::DoNotOptimize(L.invert(h));
}
BENCHMARK(BM_InvertL)->Arg(2048)->Arg(4096)->Arg(8192);

static void BM_OperatorFactor(benchmark::State& st) {
  const Grid g = Grid::line(60.0, 4096);
  for (auto _ : st) benchmark::DoNotOptimize(OperatorL(g));
}
BENCHMARK(BM_OperatorFactor);

static void BM_SolveOmega(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(solve_omega(0.5));
}
BENCHMARK(BM_SolveOmega)->Unit(benchmark::kMillisecond);

static void BM_ResidualScanPoint(benchmark::State& st) {
  const auto omega = solve_omega(0.5);
  for (auto _ : st) benchmark::DoNotOptimize(residual_scan_point(omega, 0.05, false));
}
BENCHMARK(BM_ResidualScanPoint)->Unit(benchmark::kMillisecond);

static void BM_FitSolitons(benchmark::State& st) {
  const Grid g = Grid::periodic(400.0, 4096);
  const auto u = soliton_on(g, 2.0, 150.0) + soliton_on(g, 1.1, 0.0);
  for (auto _ : st)
    benchmark::DoNotOptimize(fit_solitons(u, 0.0, 0.0, FitGuess{150.0, 2.0}, FitGuess{0.0, 1.1}, 30.0));
}
BENCHMARK(BM_FitSolitons);
BENCHMARK_MAIN();
