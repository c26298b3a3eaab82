#include <benchmark/benchmark.h>

#include "rwrs/cumulant.hpp"
#include "rwrs/limit_lab.hpp"
#include "rwrs/occupation.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/spectral.hpp"

using namespace rwrs;

namespace {

WalkPath walk(std::size_t n) {
  RandomStream s(1, 0);
  return sample_path(StepDistribution::simple_symmetric(), n, s);
}

ToralModel reference_model() {
  return {ToralAction::reference_example(), TrigPolynomial(3).add_cosine({1, 0, 0}, 2.0)};
}

}  // namespace

static void BM_SamplePath(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream s(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(StepDistribution::simple_symmetric(), n, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePath)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_Occupation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto path = walk(n);
  for (auto _ : state) benchmark::DoNotOptimize(occupation(path, {0, n}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Occupation)->Arg(10000)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_Intersections(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto path = walk(n);
  const auto a = occupation(path, {0, n / 2}), b = occupation(path, {n / 2, n - n / 2});
  for (auto _ : state) benchmark::DoNotOptimize(intersections(a, b, {1, 0}));
}
BENCHMARK(BM_Intersections)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_PowerSum4(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto w = occupation(walk(n), {0, n});
  for (auto _ : state) benchmark::DoNotOptimize(power_sum(w, 4));
}
BENCHMARK(BM_PowerSum4)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_IidScenerySum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto w = occupation(walk(n), {0, n});
  const SceneryModel model = IidLaw::gaussian();
  std::size_t r = 0;
  for (auto _ : state) {
    auto s = scenery_stream(1, 0, r++);
    benchmark::DoNotOptimize(weighted_sum(w, sample_scenery(w.keys(), model, s)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.size()));
}
BENCHMARK(BM_IidScenerySum)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_ToralScenery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto w = occupation(walk(n), {0, n});
  const SceneryModel model = reference_model();
  std::size_t r = 0;
  for (auto _ : state) {
    auto s = scenery_stream(1, 0, r++);
    benchmark::DoNotOptimize(sample_scenery(w.keys(), model, s));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.size()));
}
BENCHMARK(BM_ToralScenery)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ToralCorrelationWindow(benchmark::State& state) {
  const auto model = reference_model();
  for (auto _ : state) benchmark::DoNotOptimize(toral_correlation_window(model, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ToralCorrelationWindow)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_VarianceExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto w = occupation(walk(n), {0, n});
  MovingAverage ma;
  ma.coefficients = {{{0, 0}, 1.0}, {{1, 0}, 0.5}, {{0, 1}, -0.25}};
  const auto table = correlation_table(ma, 2);
  for (auto _ : state) benchmark::DoNotOptimize(covariance_exact(w, w, table));
}
BENCHMARK(BM_VarianceExact)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_Partitions(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(partitions(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Partitions)->DenseRange(6, 10, 2);
BENCHMARK_MAIN();
