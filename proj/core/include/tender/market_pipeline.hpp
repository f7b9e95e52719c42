#pragma once

// Batch studies over many origin-destination markets: ingest, derive model
// parameters, optimize under scenario variants, aggregate per commodity.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tender/general_model.hpp"
#include "tender/techno_params.hpp"

namespace tender {

struct MarketRecord {
  std::string market_id;
  std::string railroad;
  Region region = Region::Western;
  Commodity commodity = Commodity::Others;
  std::string origin;       // opaque, not part of the CSV schema
  std::string destination;  // opaque, not part of the CSV schema
  double distance = 0.0;       // miles
  double annual_demand = 0.0;  // cars per year
  double train_length = 0.0;   // cars
  int locomotives = 1;
  std::optional<double> speed;  // mph
  std::optional<double> t0;     // hours; exclusive with speed
  double alpha = 0.0;
  std::optional<double> gross_tons;  // per locomotive
  std::optional<double> h_override;  // USD per car-hour

  // Throws ValidationError naming the offending field.
  void validate() const;
};

inline constexpr std::string_view kMarketCsvHeader =
    "market_id,railroad,region,commodity_group,distance_mi,annual_demand_cars,"
    "train_length_cars,num_locomotives,speed_mph,t0_h,alpha,gross_tons,h_override";

struct RowError {
  std::size_t row = 0;  // 1-based file line
  std::string column;   // empty when the whole row is at fault
  std::string message;
};

struct IngestResult {
  std::vector<MarketRecord> records;  // file order
  std::vector<RowError> rejected;
};

// A bad header throws ValidationError; bad rows are collected in `rejected`.
IngestResult parse_markets(std::istream& in);
// Throws IoError when the file cannot be read.
IngestResult ingest_markets(const std::string& path);
void write_markets(std::ostream& out, std::span<const MarketRecord> records);

// Gross tons per locomotive assumed when a record leaves it blank.
double default_gross_tons(Commodity c) noexcept;

enum class CapitalCosts { Included, Excluded };

std::string_view to_string(CapitalCosts c) noexcept;

struct ScenarioSpec {
  std::string label = "default";
  CapitalCosts capital = CapitalCosts::Included;
  double delay_factor = 1.0;
  std::optional<double> charger_power;  // MW; replaces tech.charger_power
  std::optional<double> swap_hours;     // battery swapping instead of charging
  std::optional<double> carbon_price;   // USD per ton CO2-eq

  void validate() const;
  // Stable one-line description, e.g.
  // "label=x capital=included delay_factor=1 charging=3MW carbon_price=tech".
  std::string describe() const;
};

// Model inputs for one market under one scenario.
struct MarketParameters {
  GeneralModelParams model;  // per-train, tender_range is per tender car
  double range_per_locomotive_tender = 0.0;  // miles one tender gives one locomotive
  double gross_tons = 0.0;
  TrainType train_type = TrainType::Manifest;
};

// Throws ValidationError / LookupError when a parameter cannot be derived
// and InfeasibleError when no tender fits in the train.
MarketParameters derive_market(const MarketRecord& record, const TechInputs& tech,
                               const CommodityEnergyTable& table, const ScenarioSpec& scenario);

enum class ResultStatus { Ok, Infeasible, Invalid };

std::string_view to_string(ResultStatus s) noexcept;

struct BatchResult {
  std::size_t record_index = 0;
  std::size_t scenario_index = 0;
  std::string market_id;
  std::string scenario;
  std::string railroad;
  Region region = Region::Western;
  Commodity commodity = Commodity::Others;
  ResultStatus status = ResultStatus::Ok;
  std::string note;  // reason for a non-ok status

  MarketParameters params;
  double n_continuous = 0.0;                   // tenders per train
  double n_continuous_per_locomotive = 0.0;
  Bound bound = Bound::Interior;
  bool closed_form = false;
  int tenders_free = 0;  // integer optimum when any tender count is allowed
  int tenders = 0;       // integer optimum, same count behind every locomotive
  int batteries_per_locomotive = 0;
  double range = 0.0;
  double stops_continuous = 0.0;
  int stops_practical = 0;
  double stops_per_1000mi = 0.0;
  double trip_time = 0.0;
  double total_cost = 0.0;
  CostShares shares;
};

// Optimum for already-derived parameters; fills every field after
// `params`.  Throws like optimal_n_general.
BatchResult optimize_parameters(const MarketParameters& params);

// Never throws for market-level problems; they come back as a status.
BatchResult optimize_market(const MarketRecord& record, const TechInputs& tech,
                            const CommodityEnergyTable& table, const ScenarioSpec& scenario);

struct SweepOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  // Fraction of results re-checked against an exhaustive integer scan;
  // selection is a deterministic function of the result position.
#ifdef NDEBUG
  double audit_fraction = 0.0;
#else
  double audit_fraction = 0.01;
#endif
};

struct SweepSummary {
  std::size_t results = 0;
  std::size_t ok = 0;
  std::size_t infeasible = 0;
  std::size_t invalid = 0;
  std::size_t audited = 0;
  std::vector<std::size_t> audit_mismatches;  // positions in the result vector
};

struct SweepOutput {
  std::vector<BatchResult> results;  // record-major, scenario-minor
  SweepSummary summary;
};

// Throws ValidationError for an empty scenario grid or an invalid scenario.
SweepOutput sweep(std::span<const MarketRecord> records, const TechInputs& tech,
                  const CommodityEnergyTable& table, std::span<const ScenarioSpec> scenarios,
                  const SweepOptions& options = {});

// Exhaustive integer optimum for an already-derived market, per-locomotive
// granularity.  Independent of the closed form.
int audit_tenders(const MarketParameters& params);

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
};

// Linear interpolation between order statistics at h = (n - 1) q.
double percentile_sorted(std::span<const double> sorted, double q);
// Throws ValidationError for an empty sample.
SummaryStats summarize(std::vector<double> values);

enum class Metric {
  BatteriesPerLocomotive,
  Range,
  StopsPer1000Mi,
  ShareLocomotive,
  ShareBattery,
  ShareCharging,
  ShareDelay,
};

std::string_view to_string(Metric m) noexcept;
double metric_value(const BatchResult& r, Metric m) noexcept;
// Capital-excluded runs have no equipment shares to report.
std::span<const Metric> metrics_for(CapitalCosts capital) noexcept;

struct MetricStats {
  Metric metric = Metric::BatteriesPerLocomotive;
  SummaryStats stats;
};

struct GroupAggregate {
  Commodity commodity = Commodity::Others;
  std::vector<MetricStats> metrics;
};

struct ScenarioAggregate {
  std::string scenario;
  CapitalCosts capital = CapitalCosts::Included;
  std::size_t markets = 0;
  std::size_t excluded = 0;  // infeasible or invalid
  std::vector<GroupAggregate> groups;  // commodity enum order
  std::vector<std::string> notices;    // groups omitted for lack of data
};

struct AggregateStats {
  std::vector<ScenarioAggregate> scenarios;  // first-appearance order
};

// Groups ok results by scenario then commodity.  `scenarios` supplies the
// capital mode per label; results for labels not listed are rejected.
AggregateStats aggregate(std::span<const BatchResult> results,
                         std::span<const ScenarioSpec> scenarios);

struct DieselComparison {
  BatchResult battery;
  DieselBaseline diesel;
  double battery_total = 0.0;
  double battery_financial = 0.0;  // locomotive + battery + charging
  double battery_delay = 0.0;
  double diesel_total = 0.0;       // locomotive + fuel + delay
  double diesel_financial = 0.0;   // locomotive + fuel
  double diesel_delay = 0.0;
  bool battery_cheaper_financial = false;
  bool battery_cheaper_total = false;
};

// Delay on the diesel side is h t0 Q; fuel carries the carbon price of the
// scenario.  Throws when the battery side is not ok.
DieselComparison compare_diesel(const MarketRecord& record, const TechInputs& tech,
                                const CommodityEnergyTable& table,
                                const ScenarioSpec& scenario = {});

// Same comparison against an already-optimized battery configuration whose
// parameters may have been adjusted by hand.  `tech` must carry the carbon
// price to charge on diesel fuel.
DieselComparison compare_diesel(const MarketRecord& record, const BatchResult& battery,
                                const TechInputs& tech, const CommodityEnergyTable& table);

}  // namespace tender
