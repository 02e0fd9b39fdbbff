#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fairreg/fair_pipeline.hpp"
#include "fairreg/isotonic.hpp"
#include "fairreg/metrics.hpp"
#include "fairreg/simulation.hpp"
#include "fairreg/splines.hpp"

using namespace fairreg;

namespace {

struct Sample {
  std::vector<double> us, ys;
};

Sample noisy_monotone(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> z;
  Sample s;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = unit(rng);
    s.us.push_back(u);
    s.ys.push_back(3.0 * u + z(rng));
  }
  return s;
}

void BM_IsotonicSquared(benchmark::State& state) {
  const Sample s = noisy_monotone(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_isotonic(s.us, s.ys, LossSpec::squared()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_IsotonicSquared)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_IsotonicHuber(benchmark::State& state) {
  const Sample s = noisy_monotone(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_isotonic(s.us, s.ys, LossSpec::huber(1.0)));
}
BENCHMARK(BM_IsotonicHuber)->RangeMultiplier(4)->Range(256, 16384);

void BM_IsplineFit(benchmark::State& state) {
  const Sample s = noisy_monotone(1000);
  const SplineBasisConfig config{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(fit_ispline(s.us, s.ys, LossSpec::squared(), config));
}
BENCHMARK(BM_IsplineFit)->Args({1, 0})->Args({3, 2})->Args({3, 6})->Args({6, 6})->Unit(benchmark::kMillisecond);

void BM_KsDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  std::vector<double> values;
  std::vector<GroupLabel> groups;
  for (std::size_t i = 0; i < n; ++i) {
    values.push_back(z(rng));
    groups.push_back(i % 2 == 0 ? "0" : "1");
  }
  for (auto _ : state) benchmark::DoNotOptimize(ks_distance(values, groups));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KsDistance)->RangeMultiplier(4)->Range(1024, 262144)->Complexity();

void BM_FitFairIsotonic(benchmark::State& state) {
  const Dataset d = gen_shift_squared(static_cast<std::size_t>(state.range(0)), 5.0, 1.0, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_fair(d, LossSpec::squared(), QClassConfig::isotonic()));
  }
}
BENCHMARK(BM_FitFairIsotonic)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
