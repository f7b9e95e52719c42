#include "tender/market_pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "tender/errors.hpp"
#include "tender/oracle.hpp"
#include "text.hpp"

namespace tender {

namespace {

constexpr std::array<std::string_view, 13> kColumns = {
    "market_id",  "railroad",   "region", "commodity_group", "distance_mi",
    "annual_demand_cars", "train_length_cars", "num_locomotives", "speed_mph",
    "t0_h",       "alpha",      "gross_tons", "h_override"};

enum Col : std::size_t {
  kId, kRailroad, kRegion, kCommodity, kDistance, kDemand, kLength, kLocos, kSpeed, kT0,
  kAlpha, kGross, kHOverride
};

struct FieldError {
  std::string column;
  std::string message;
};

double number_field(const std::vector<std::string>& f, Col c) {
  const auto v = text::parse_double(f[c]);
  if (!v || !std::isfinite(*v)) {
    throw FieldError{std::string(kColumns[c]), "not a number: '" + f[c] + "'"};
  }
  return *v;
}

std::optional<double> optional_field(const std::vector<std::string>& f, Col c) {
  if (text::trim(f[c]).empty()) return std::nullopt;
  return number_field(f, c);
}

MarketRecord parse_row(const std::vector<std::string>& f) {
  MarketRecord r;
  r.market_id = f[kId];
  if (r.market_id.empty()) throw FieldError{"market_id", "empty"};
  r.railroad = f[kRailroad];
  try {
    r.region = parse_region(f[kRegion]);
  } catch (const LookupError& e) {
    throw FieldError{"region", e.what()};
  }
  try {
    r.commodity = parse_commodity(f[kCommodity]);
  } catch (const LookupError& e) {
    throw FieldError{"commodity_group", e.what()};
  }
  r.distance = number_field(f, kDistance);
  r.annual_demand = number_field(f, kDemand);
  r.train_length = number_field(f, kLength);
  const double locos = number_field(f, kLocos);
  if (locos < 1.0 || locos != std::floor(locos) || locos > 1000.0) {
    throw FieldError{"num_locomotives", "must be a whole number >= 1"};
  }
  r.locomotives = static_cast<int>(locos);
  r.speed = optional_field(f, kSpeed);
  r.t0 = optional_field(f, kT0);
  r.alpha = number_field(f, kAlpha);
  r.gross_tons = optional_field(f, kGross);
  r.h_override = optional_field(f, kHOverride);
  return r;
}

// Column named in invariant violations, keyed on the message prefix.
std::string column_for(std::string_view message) {
  for (const auto c : kColumns) {
    if (message.substr(0, c.size()) == c) return std::string(c);
  }
  return {};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool audit_selected(std::size_t position, double fraction) {
  if (fraction <= 0.0) return false;
  if (fraction >= 1.0) return true;
  const double u = static_cast<double>(splitmix64(position) >> 11) * 0x1.0p-53;
  return u < fraction;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? text::format_double(*v) : std::string();
}

}  // namespace

void MarketRecord::validate() const {
  auto positive = [](double v, const char* column) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw ValidationError(std::string(column) + " must be positive");
    }
  };
  positive(distance, "distance_mi");
  positive(annual_demand, "annual_demand_cars");
  positive(train_length, "train_length_cars");
  positive(alpha, "alpha");
  if (locomotives < 1) throw ValidationError("num_locomotives must be >= 1");
  if (speed.has_value() == t0.has_value()) {
    throw ValidationError(speed ? "speed_mph and t0_h are both given; supply exactly one"
                                : "speed_mph and t0_h are both empty; supply exactly one");
  }
  if (speed) positive(*speed, "speed_mph");
  if (t0) positive(*t0, "t0_h");
  if (gross_tons) positive(*gross_tons, "gross_tons");
  if (h_override && !(std::isfinite(*h_override) && *h_override >= 0.0)) {
    throw ValidationError("h_override must be >= 0");
  }
}

IngestResult parse_markets(std::istream& in) {
  IngestResult out;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (!line.empty() && line.front() == '#') continue;
      const auto names = text::split_csv(line);
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        if (c >= names.size() || names[c] != kColumns[c]) {
          throw ValidationError("row " + std::to_string(row) + ": missing column '" +
                                std::string(kColumns[c]) + "'; header must be " +
                                std::string(kMarketCsvHeader));
        }
      }
      if (names.size() != kColumns.size()) {
        throw ValidationError("row " + std::to_string(row) + ": unexpected column '" +
                              names[kColumns.size()] + "'");
      }
      header_seen = true;
      continue;
    }
    if (text::trim(line).empty()) continue;
    const auto fields = text::split_csv(line);
    if (fields.size() != kColumns.size()) {
      out.rejected.push_back({row, {}, "expected " + std::to_string(kColumns.size()) +
                                           " fields, found " + std::to_string(fields.size())});
      continue;
    }
    try {
      auto record = parse_row(fields);
      record.validate();
      out.records.push_back(std::move(record));
    } catch (const FieldError& e) {
      out.rejected.push_back({row, e.column, e.message});
    } catch (const ValidationError& e) {
      out.rejected.push_back({row, column_for(e.what()), e.what()});
    }
  }
  if (!header_seen) throw ValidationError("market file is empty; expected header");
  return out;
}

IngestResult ingest_markets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open market file " + path);
  return parse_markets(in);
}

void write_markets(std::ostream& out, std::span<const MarketRecord> records) {
  out << kMarketCsvHeader << '\n';
  for (const auto& r : records) {
    out << text::csv_escape(r.market_id) << ',' << text::csv_escape(r.railroad) << ','
        << to_string(r.region) << ',' << text::csv_escape(to_string(r.commodity)) << ','
        << text::format_double(r.distance) << ',' << text::format_double(r.annual_demand) << ','
        << text::format_double(r.train_length) << ',' << r.locomotives << ','
        << format_optional(r.speed) << ',' << format_optional(r.t0) << ','
        << text::format_double(r.alpha) << ',' << format_optional(r.gross_tons) << ','
        << format_optional(r.h_override) << '\n';
  }
}

double default_gross_tons(Commodity c) noexcept {
  return c == Commodity::Coal ? 2540.0 : 1600.0;
}

std::string_view to_string(CapitalCosts c) noexcept {
  return c == CapitalCosts::Included ? "included" : "excluded";
}

void ScenarioSpec::validate() const {
  if (label.empty() || label.find_first_of(",\"\n") != std::string::npos) {
    throw ValidationError("scenario label must be non-empty without commas or quotes");
  }
  if (!(std::isfinite(delay_factor) && delay_factor > 0.0)) {
    throw ValidationError("delay_factor must be > 0");
  }
  if (charger_power && swap_hours) {
    throw ValidationError("scenario '" + label + "' sets both charger power and swap time");
  }
  if (charger_power && !(*charger_power > 0.0)) {
    throw ValidationError("charger power must be > 0");
  }
  if (swap_hours && !(*swap_hours >= 0.0)) throw ValidationError("swap time must be >= 0");
  if (carbon_price && !(*carbon_price >= 0.0)) {
    throw ValidationError("carbon price must be >= 0");
  }
}

std::string ScenarioSpec::describe() const {
  std::string s = "label=" + label + " capital=" + std::string(to_string(capital)) +
                  " delay_factor=" + text::format_double(delay_factor) + " charging=";
  if (swap_hours) {
    s += "swap" + text::format_double(*swap_hours) + "h";
  } else if (charger_power) {
    s += text::format_double(*charger_power) + "MW";
  } else {
    s += "tech";
  }
  s += " carbon_price=" + (carbon_price ? text::format_double(*carbon_price) : "tech");
  return s;
}

MarketParameters derive_market(const MarketRecord& record, const TechInputs& base_tech,
                               const CommodityEnergyTable& table, const ScenarioSpec& scenario) {
  record.validate();
  scenario.validate();

  TechInputs tech = base_tech;
  if (scenario.charger_power) tech.charger_power = *scenario.charger_power;
  if (scenario.carbon_price) tech.carbon_price = *scenario.carbon_price;

  MarketParameters out;
  out.train_type = train_type_for(record.commodity);
  out.gross_tons = record.gross_tons.value_or(default_gross_tons(record.commodity));
  out.range_per_locomotive_tender =
      range_per_tender(tech, table, record.commodity, record.region, out.gross_tons);

  const StopMode mode = scenario.swap_hours ? StopMode{Swapping{*scenario.swap_hours}}
                                            : StopMode{Charging{}};

  auto& m = out.model;
  m.base.distance = record.distance;
  m.base.nominal_time = record.t0 ? *record.t0
                                  : nominal_trip_time(record.distance, *record.speed,
                                                      tech.initial_stop_time);
  m.base.train_length = record.train_length;
  m.base.demand = record.annual_demand;
  m.base.tender_range = out.range_per_locomotive_tender / record.locomotives;
  m.base.alpha = record.alpha;
  const double h = record.h_override ? *record.h_override
                                     : delay_cost_lookup(out.train_type, record.distance);
  m.base.holding_cost = h * scenario.delay_factor;
  m.base.stop_time = stop_time(tech, mode);
  m.locomotives = record.locomotives;
  const bool capital = scenario.capital == CapitalCosts::Included;
  m.loco_rate = capital ? locomotive_hourly_cost(tech) : 0.0;
  m.tender_rate = capital ? battery_hourly_cost(tech) : 0.0;
  m.stop_energy_cost = charge_cost_per_stop(tech);

  m.validate();
  if (max_feasible_multiple(record.train_length, record.alpha, record.locomotives) < 1) {
    throw InfeasibleError("train of " + text::format_double(record.train_length) +
                          " cars cannot carry one tender per locomotive");
  }
  return out;
}

std::string_view to_string(ResultStatus s) noexcept {
  switch (s) {
    case ResultStatus::Ok: return "ok";
    case ResultStatus::Infeasible: return "infeasible";
    case ResultStatus::Invalid: return "invalid";
  }
  return "invalid";
}

BatchResult optimize_parameters(const MarketParameters& params) {
  BatchResult r;
  r.params = params;
  const auto& p = r.params.model;
  const int nl = p.locomotives;
  const auto opt = optimal_n_general(p, Granularity::per_locomotive(nl));
  const auto& e = opt.integer.evaluation;
  r.n_continuous = opt.n_continuous;
  r.n_continuous_per_locomotive = opt.n_continuous / nl;
  r.bound = opt.bound;
  r.closed_form = opt.closed_form;
  r.tenders_free = nl == 1 ? opt.integer.n : optimal_n_general(p).integer.n;
  r.tenders = opt.integer.n;
  r.batteries_per_locomotive = opt.integer.per_unit;
  r.range = e.range;
  r.stops_continuous = e.stops_continuous;
  r.stops_practical = e.stops_practical;
  r.stops_per_1000mi = e.stops_continuous * 1000.0 / p.base.distance;
  r.trip_time = e.trip_time;
  r.total_cost = e.total_cost;
  r.shares = cost_shares(p, r.tenders);
  return r;
}

BatchResult optimize_market(const MarketRecord& record, const TechInputs& tech,
                            const CommodityEnergyTable& table, const ScenarioSpec& scenario) {
  BatchResult r;
  try {
    r = optimize_parameters(derive_market(record, tech, table, scenario));
  } catch (const InfeasibleError& e) {
    r.status = ResultStatus::Infeasible;
    r.note = e.what();
  } catch (const Error& e) {
    r.status = ResultStatus::Invalid;
    r.note = e.what();
  }
  r.market_id = record.market_id;
  r.scenario = scenario.label;
  r.railroad = record.railroad;
  r.region = record.region;
  r.commodity = record.commodity;
  return r;
}

int audit_tenders(const MarketParameters& params) {
  const auto& p = params.model;
  const auto& b = p.base;
  // Cost straight from the definitions: k(n) Q/(L - a n) + h t(n) Q.
  auto cost = [&](int n) {
    const double stops = b.distance / (b.tender_range * n);
    const double hours = b.nominal_time + stops * b.stop_time;
    const double per_train =
        (p.locomotives * p.loco_rate + n * p.tender_rate) * hours + p.stop_energy_cost * n * stops;
    return per_train * b.demand / (b.train_length - b.alpha * n) +
           b.holding_cost * hours * b.demand;
  };
  return oracle::integer_scan(cost, b.train_length, b.alpha, p.locomotives).n;
}

SweepOutput sweep(std::span<const MarketRecord> records, const TechInputs& tech,
                  const CommodityEnergyTable& table, std::span<const ScenarioSpec> scenarios,
                  const SweepOptions& options) {
  if (scenarios.empty()) throw ValidationError("scenario grid is empty");
  std::set<std::string> labels;
  for (const auto& s : scenarios) {
    s.validate();
    if (!labels.insert(s.label).second) {
      throw ValidationError("duplicate scenario label '" + s.label + "'");
    }
  }
  tech.validate();

  const std::size_t total = records.size() * scenarios.size();
  SweepOutput out;
  out.results.resize(total);
  std::vector<char> audited(total, 0);
  std::vector<char> mismatch(total, 0);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
      const std::size_t rec = i / scenarios.size();
      const std::size_t sc = i % scenarios.size();
      auto& r = out.results[i];
      r = optimize_market(records[rec], tech, table, scenarios[sc]);
      r.record_index = rec;
      r.scenario_index = sc;
      if (r.status == ResultStatus::Ok && audit_selected(i, options.audit_fraction)) {
        audited[i] = 1;
        mismatch[i] = audit_tenders(r.params) != r.tenders;
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, 64);
  if (threads == 1 || total < 256) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  auto& s = out.summary;
  s.results = total;
  for (std::size_t i = 0; i < total; ++i) {
    switch (out.results[i].status) {
      case ResultStatus::Ok: ++s.ok; break;
      case ResultStatus::Infeasible: ++s.infeasible; break;
      case ResultStatus::Invalid: ++s.invalid; break;
    }
    s.audited += audited[i];
    if (mismatch[i]) s.audit_mismatches.push_back(i);
  }
  return out;
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("percentile level must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

SummaryStats summarize(std::vector<double> values) {
  if (values.empty()) throw ValidationError("summary of an empty sample");
  // Sorting first makes every statistic independent of input order.
  std::sort(values.begin(), values.end());
  SummaryStats s;
  s.count = values.size();
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  s.p25 = percentile_sorted(values, 0.25);
  s.median = percentile_sorted(values, 0.5);
  s.p75 = percentile_sorted(values, 0.75);
  return s;
}

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::BatteriesPerLocomotive: return "batteries_per_locomotive";
    case Metric::Range: return "range_mi";
    case Metric::StopsPer1000Mi: return "stops_per_1000mi";
    case Metric::ShareLocomotive: return "locomotive_cost_pct";
    case Metric::ShareBattery: return "battery_cost_pct";
    case Metric::ShareCharging: return "charging_cost_pct";
    case Metric::ShareDelay: return "delay_cost_pct";
  }
  return "";
}

double metric_value(const BatchResult& r, Metric m) noexcept {
  switch (m) {
    case Metric::BatteriesPerLocomotive: return r.batteries_per_locomotive;
    case Metric::Range: return r.range;
    case Metric::StopsPer1000Mi: return r.stops_per_1000mi;
    case Metric::ShareLocomotive: return r.shares.locomotive;
    case Metric::ShareBattery: return r.shares.battery;
    case Metric::ShareCharging: return r.shares.charging;
    case Metric::ShareDelay: return r.shares.delay;
  }
  return 0.0;
}

std::span<const Metric> metrics_for(CapitalCosts capital) noexcept {
  static constexpr std::array kIncluded = {
      Metric::BatteriesPerLocomotive, Metric::Range,         Metric::StopsPer1000Mi,
      Metric::ShareLocomotive,        Metric::ShareBattery,  Metric::ShareCharging,
      Metric::ShareDelay};
  static constexpr std::array kExcluded = {Metric::BatteriesPerLocomotive, Metric::Range,
                                           Metric::StopsPer1000Mi, Metric::ShareCharging,
                                           Metric::ShareDelay};
  if (capital == CapitalCosts::Included) return kIncluded;
  return kExcluded;
}

AggregateStats aggregate(std::span<const BatchResult> results,
                         std::span<const ScenarioSpec> scenarios) {
  AggregateStats out;
  auto scenario_for = [&](const std::string& label) -> const ScenarioSpec& {
    for (const auto& s : scenarios) {
      if (s.label == label) return s;
    }
    throw ValidationError("result refers to unknown scenario '" + label + "'");
  };
  std::vector<std::string> order;
  for (const auto& r : results) {
    scenario_for(r.scenario);
    if (std::find(order.begin(), order.end(), r.scenario) == order.end()) {
      order.push_back(r.scenario);
    }
  }

  for (const auto& label : order) {
    const auto& spec = scenario_for(label);
    ScenarioAggregate agg;
    agg.scenario = label;
    agg.capital = spec.capital;
    for (const auto c : all_commodities()) {
      std::vector<const BatchResult*> group;
      for (const auto& r : results) {
        if (r.scenario != label || r.commodity != c) continue;
        if (r.status == ResultStatus::Ok) {
          group.push_back(&r);
        }
      }
      if (group.empty()) {
        agg.notices.push_back("no feasible markets for " + std::string(to_string(c)) +
                              "; group omitted");
        continue;
      }
      GroupAggregate g;
      g.commodity = c;
      for (const auto m : metrics_for(spec.capital)) {
        std::vector<double> values;
        values.reserve(group.size());
        for (const auto* r : group) values.push_back(metric_value(*r, m));
        g.metrics.push_back({m, summarize(std::move(values))});
      }
      agg.groups.push_back(std::move(g));
    }
    for (const auto& r : results) {
      if (r.scenario != label) continue;
      ++agg.markets;
      if (r.status != ResultStatus::Ok) ++agg.excluded;
    }
    out.scenarios.push_back(std::move(agg));
  }
  return out;
}

DieselComparison compare_diesel(const MarketRecord& record, const TechInputs& tech,
                                const CommodityEnergyTable& table, const ScenarioSpec& scenario) {
  const auto battery = optimize_market(record, tech, table, scenario);
  if (battery.status == ResultStatus::Infeasible) throw InfeasibleError(battery.note);
  if (battery.status != ResultStatus::Ok) throw ValidationError(battery.note);
  TechInputs diesel_tech = tech;
  if (scenario.carbon_price) diesel_tech.carbon_price = *scenario.carbon_price;
  return compare_diesel(record, battery, diesel_tech, table);
}

DieselComparison compare_diesel(const MarketRecord& record, const BatchResult& battery,
                                const TechInputs& tech, const CommodityEnergyTable& table) {
  if (battery.status != ResultStatus::Ok) throw ValidationError(battery.note);
  DieselComparison c;
  c.battery = battery;
  const auto& p = c.battery.params.model;

  DieselMarket m;
  m.distance = p.base.distance;
  m.demand = p.base.demand;
  m.train_length = p.base.train_length;
  m.locomotives = p.locomotives;
  m.nominal_time = p.base.nominal_time;
  m.gross_tons = c.battery.params.gross_tons;
  m.commodity = record.commodity;
  m.region = record.region;
  c.diesel = diesel_baseline(m, table, tech);

  const auto eval = total_cost_general(p, c.battery.tenders);
  c.battery_total = eval.total_cost;
  c.battery_delay = p.base.holding_cost * eval.trip_time * p.base.demand;
  c.battery_financial = c.battery_total - c.battery_delay;
  c.diesel_delay = p.base.holding_cost * c.diesel.trip_time * p.base.demand;
  c.diesel_financial = c.diesel.total;
  c.diesel_total = c.diesel_financial + c.diesel_delay;
  c.battery_cheaper_financial = c.battery_financial < c.diesel_financial;
  c.battery_cheaper_total = c.battery_total < c.diesel_total;
  return c;
}

}  // namespace tender
