#include <benchmark/benchmark.h>

#include <sstream>

#include "tender/market_pipeline.hpp"
#include "tender/report_io.hpp"
#include "tender/synthetic.hpp"

namespace {

const std::vector<tender::MarketRecord>& markets() {
  static const auto m = tender::generate_markets();
  return m;
}

void BM_Batch(benchmark::State& state) {
  const auto table = tender::CommodityEnergyTable::bundled();
  const tender::ScenarioSpec scenario;
  tender::SweepOptions options;
  options.threads = static_cast<unsigned>(state.range(0));
  options.audit_fraction = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tender::sweep(markets(), tender::TechInputs{}, table, std::span(&scenario, 1), options));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(markets().size()));
}
BENCHMARK(BM_Batch)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_AggregateAndWrite(benchmark::State& state) {
  const auto table = tender::CommodityEnergyTable::bundled();
  const tender::ScenarioSpec scenario;
  const auto out = tender::sweep(markets(), tender::TechInputs{}, table, std::span(&scenario, 1));
  const tender::RunMetadata meta;
  for (auto _ : state) {
    const auto stats = tender::aggregate(out.results, std::span(&scenario, 1));
    std::ostringstream csv, json;
    tender::write_results_csv(csv, out.results, meta);
    tender::write_aggregates_json(json, stats, out.results, meta);
    benchmark::DoNotOptimize(csv.str().size() + json.str().size());
  }
}
BENCHMARK(BM_AggregateAndWrite)->Unit(benchmark::kMillisecond);

void BM_Ingest(benchmark::State& state) {
  std::ostringstream csv;
  tender::write_markets(csv, markets());
  const std::string text = csv.str();
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(tender::parse_markets(in));
  }
}
BENCHMARK(BM_Ingest)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
