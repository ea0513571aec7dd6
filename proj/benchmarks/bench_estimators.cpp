#include <benchmark/benchmark.h>

#include "dthazard/bandwidth.hpp"
#include "dthazard/bootstrap.hpp"
#include "dthazard/existence.hpp"
#include "dthazard/hazard.hpp"
#include "dthazard/npmle.hpp"
#include "dthazard/simulation.hpp"
#include "dthazard/spmle.hpp"

using namespace dthazard;

namespace {

Sample m1_sample(std::size_t n) {
  RandomStream rng(2024, n);
  return generate_sample(ModelSpec::m1(), n, rng);
}

}  // namespace

static void BM_Existence(benchmark::State& state) {
  const Sample s = m1_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_existence(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Existence)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_Npmle(benchmark::State& state) {
  const Sample s = m1_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_npmle(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Npmle)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond);

static void BM_SpmleBetaOne(benchmark::State& state) {
  const Sample s = m1_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_spmle(s, ParametricFamily::beta_one()));
}
BENCHMARK(BM_SpmleBetaOne)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond);

static void BM_SpmleBeta(benchmark::State& state) {
  const Sample s = m1_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_spmle(s, ParametricFamily::beta()));
}
BENCHMARK(BM_SpmleBeta)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_HazardCurve(benchmark::State& state) {
  const Sample s = m1_sample(static_cast<std::size_t>(state.range(0)));
  const NpmleFit fit = fit_npmle(s);
  const auto grid = default_grid(s, 256);
  for (auto _ : state)
    benchmark::DoNotOptimize(hazard_np(fit, 0.1, KernelSpec::epanechnikov(), grid));
}
BENCHMARK(BM_HazardCurve)->RangeMultiplier(4)->Range(256, 16384);

static void BM_LscvNp(benchmark::State& state) {
  const Sample s = m1_sample(static_cast<std::size_t>(state.range(0)));
  const NpmleFit fit = fit_npmle(s);
  const auto grid = default_h_grid(s, KernelSpec::epanechnikov());
  for (auto _ : state) benchmark::DoNotOptimize(select_bandwidth(fit, grid));
}
BENCHMARK(BM_LscvNp)->Arg(100)->Arg(250)->Unit(benchmark::kMillisecond);

static void BM_LscvSp(benchmark::State& state) {
  const Sample s = m1_sample(static_cast<std::size_t>(state.range(0)));
  const SpmleFit fit = fit_spmle(s, ParametricFamily::beta_one());
  const auto grid = default_h_grid(s, KernelSpec::epanechnikov());
  for (auto _ : state) benchmark::DoNotOptimize(select_bandwidth(fit, grid));
}
BENCHMARK(BM_LscvSp)->Arg(100)->Arg(250)->Unit(benchmark::kMillisecond);

static void BM_BootstrapSp(benchmark::State& state) {
  const Sample s = m1_sample(250);
  const SpmleFit fit = fit_spmle(s, ParametricFamily::beta_one());
  const std::vector<double> grid{0.6};
  BootstrapConfig c;
  c.B = static_cast<std::size_t>(state.range(0));
  c.pilot_h0 = 0.1;
  for (auto _ : state)
    benchmark::DoNotOptimize(confidence_bands(fit, 0.1, KernelSpec::epanechnikov(), grid, c));
}
BENCHMARK(BM_BootstrapSp)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
