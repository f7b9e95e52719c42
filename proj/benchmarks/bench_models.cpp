#include <benchmark/benchmark.h>

#include <vector>

#include "random_params.hpp"
#include "tender/core_model.hpp"
#include "tender/general_model.hpp"

namespace {

using tender::testing::ParamSampler;

template <typename Make>
auto sample(Make&& make) {
  std::vector<decltype(make())> out;
  for (int i = 0; i < 1024; ++i) out.push_back(make());
  return out;
}

void BM_SimpleContinuous(benchmark::State& state) {
  ParamSampler s(1);
  const auto params = sample([&] { return s.simple(); });
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tender::optimal_n_continuous(params[i++ % params.size()]));
  }
}
BENCHMARK(BM_SimpleContinuous);

void BM_SimpleInteger(benchmark::State& state) {
  ParamSampler s(2);
  const auto params = sample([&] { return s.simple(); });
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tender::optimal_n_integer(params[i++ % params.size()]));
  }
}
BENCHMARK(BM_SimpleInteger);

void BM_GeneralOptimum(benchmark::State& state) {
  ParamSampler s(3);
  const auto params = sample([&] { return s.general(); });
  const auto granularity = tender::Granularity::per_locomotive(static_cast<int>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = params[i++ % params.size()];
    if (tender::max_feasible_multiple(p.base.train_length, p.base.alpha, granularity.multiple) < 1) {
      continue;
    }
    benchmark::DoNotOptimize(tender::optimal_n_general(p, granularity));
  }
}
BENCHMARK(BM_GeneralOptimum)->Arg(1)->Arg(4);

void BM_GeneralTotalCost(benchmark::State& state) {
  ParamSampler s(4);
  const auto params = sample([&] { return s.general(); });
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = params[i++ % params.size()];
    benchmark::DoNotOptimize(tender::total_cost_general(p, 1.0));
  }
}
BENCHMARK(BM_GeneralTotalCost);

}  // namespace

BENCHMARK_MAIN();
