#include <benchmark/benchmark.h>

#include "slicedot/datasets.hpp"
#include "slicedot/distances.hpp"
#include "slicedot/transport.hpp"

using namespace slicedot;

namespace {

constexpr std::size_t kDim = 10;

std::pair<EmpiricalMeasure, EmpiricalMeasure> pair_of(std::size_t k) {
  RngStream rng(k);
  auto [a, b] = datasets::gauss_hd(rng, k, kDim);
  return {EmpiricalMeasure(std::move(a)), EmpiricalMeasure(std::move(b))};
}

void BM_Sw(benchmark::State& state) {
  const auto [mu, nu] = pair_of(static_cast<std::size_t>(state.range(0)));
  SlicedConfig cfg;
  cfg.n_projections = 50;
  for (auto _ : state) benchmark::DoNotOptimize(sw(mu, nu, cfg));
  state.SetComplexityN(state.range(0));
}

void BM_Gsw(benchmark::State& state) {
  const auto [mu, nu] = pair_of(static_cast<std::size_t>(state.range(0)));
  SlicedConfig cfg;
  cfg.n_projections = 50;
  cfg.defining = DefiningFunction::circular();
  for (auto _ : state) benchmark::DoNotOptimize(gsw(mu, nu, cfg));
  state.SetComplexityN(state.range(0));
}

void BM_MaxSw(benchmark::State& state) {
  const auto [mu, nu] = pair_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(max_sw(mu, nu, MaxSwConfig{}).value);
  state.SetComplexityN(state.range(0));
}

void BM_Dsw(benchmark::State& state) {
  const auto [mu, nu] = pair_of(static_cast<std::size_t>(state.range(0)));
  DswConfig cfg;
  cfg.base.n_projections = 50;
  RngStream map_rng(7);
  const SphereMap init = SphereMap::near_identity(kDim, map_rng);
  for (auto _ : state) {
    SphereMap map = init;
    benchmark::DoNotOptimize(dsw(mu, nu, cfg, map).sliced_value);
  }
  state.SetComplexityN(state.range(0));
}

void BM_Wasserstein1d(benchmark::State& state) {
  RngStream rng(3);
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto a = Measure1D::uniform(sample_standard_normal(rng, {k}));
  const auto b = Measure1D::uniform(sample_standard_normal(rng, {k}));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_1d(a, b, 2.0));
  state.SetComplexityN(state.range(0));
}

void BM_ExactOracle(benchmark::State& state) {
  const auto [mu, nu] = pair_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exact_wp_oracle(mu, nu, 2.0).value);
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_Sw)->RangeMultiplier(2)->Range(64, 8192)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_Gsw)->RangeMultiplier(2)->Range(64, 8192)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_MaxSw)->RangeMultiplier(2)->Range(64, 8192)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_Dsw)->RangeMultiplier(2)->Range(64, 8192)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_Wasserstein1d)->RangeMultiplier(4)->Range(64, 65536)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_ExactOracle)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);
BENCHMARK_MAIN();
