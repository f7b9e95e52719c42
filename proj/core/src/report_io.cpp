#include "tender/report_io.hpp"

#include <array>
#include <cstdio>
#include <ostream>

#include "bundled_data.hpp"
#include "json.hpp"
#include "text.hpp"

namespace tender {

namespace {

constexpr std::array<std::string_view, 33> kResultColumns = {
    "market_id",       "scenario",        "railroad",
    "region",          "commodity_group", "status",
    "locomotives",     "distance_mi",     "demand_cars",
    "train_length_cars", "alpha",         "t0_h",
    "holding_cost",    "tender_range_mi", "stop_time_h",
    "stop_energy_cost", "loco_rate",      "tender_rate",
    "n_continuous",    "bound",           "tenders",
    "batteries_per_locomotive", "range_mi", "stops_continuous",
    "stops_practical", "stops_per_1000mi", "trip_time_h",
    "total_cost",      "share_locomotive", "share_battery",
    "share_charging",  "share_delay",     "note"};

nlohmann::ordered_json metadata_json(const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["tool_version"] = meta.tool_version;
  j["scenarios"] = meta.scenarios;
  j["input_checksum"] = meta.input_checksum;
  j["percentile_rule"] = meta.percentile_rule;
  auto& cfg = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta.config) cfg[k] = v;
  return j;
}

}  // namespace

std::string_view library_version() noexcept { return TENDER_VERSION; }

std::string checksum(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(text::fnv1a(bytes)));
  return buf;
}

std::span<const std::string_view> result_columns() noexcept { return kResultColumns; }

std::string_view results_schema() noexcept { return bundled::results_schema(); }

void write_results_csv(std::ostream& out, std::span<const BatchResult> results,
                       const RunMetadata& meta) {
  out << "# tool: tender " << meta.tool_version << '\n';
  for (const auto& s : meta.scenarios) out << "# scenario: " << s << '\n';
  out << "# input_checksum: " << meta.input_checksum << '\n';
  out << "# percentile_rule: " << meta.percentile_rule << '\n';
  for (const auto& [k, v] : meta.config) out << "# config: " << k << '=' << v << '\n';

  for (std::size_t i = 0; i < kResultColumns.size(); ++i) {
    out << (i ? "," : "") << kResultColumns[i];
  }
  out << '\n';

  using text::format_double;
  for (const auto& r : results) {
    const auto& b = r.params.model.base;
    const auto& m = r.params.model;
    out << text::csv_escape(r.market_id) << ',' << text::csv_escape(r.scenario) << ','
        << text::csv_escape(r.railroad) << ',' << to_string(r.region) << ','
        << text::csv_escape(to_string(r.commodity)) << ',' << to_string(r.status) << ',';
    if (r.status != ResultStatus::Ok) {
      // Derived inputs may be partial; only identification and the reason.
      for (std::size_t i = 6; i + 1 < kResultColumns.size(); ++i) out << ',';
      out << text::csv_escape(r.note) << '\n';
      continue;
    }
    out << m.locomotives << ',' << format_double(b.distance) << ',' << format_double(b.demand)
        << ',' << format_double(b.train_length) << ',' << format_double(b.alpha) << ','
        << format_double(b.nominal_time) << ',' << format_double(b.holding_cost) << ','
        << format_double(b.tender_range) << ',' << format_double(b.stop_time) << ','
        << format_double(m.stop_energy_cost) << ',' << format_double(m.loco_rate) << ','
        << format_double(m.tender_rate) << ',' << format_double(r.n_continuous) << ','
        << to_string(r.bound) << ',' << r.tenders << ',' << r.batteries_per_locomotive << ','
        << format_double(r.range) << ',' << format_double(r.stops_continuous) << ','
        << r.stops_practical << ',' << format_double(r.stops_per_1000mi) << ','
        << format_double(r.trip_time) << ',' << format_double(r.total_cost) << ','
        << format_double(r.shares.locomotive) << ',' << format_double(r.shares.battery) << ','
        << format_double(r.shares.charging) << ',' << format_double(r.shares.delay) << ",\n";
  }
}

void write_aggregates_json(std::ostream& out, const AggregateStats& stats,
                           std::span<const BatchResult> results, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["metadata"] = metadata_json(meta);

  std::size_t ok = 0, infeasible = 0, invalid = 0;
  auto flagged = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    switch (r.status) {
      case ResultStatus::Ok: ++ok; continue;
      case ResultStatus::Infeasible: ++infeasible; break;
      case ResultStatus::Invalid: ++invalid; break;
    }
    flagged.push_back({{"market_id", r.market_id},
                       {"scenario", r.scenario},
                       {"status", to_string(r.status)},
                       {"note", r.note}});
  }
  j["summary"] = {{"results", results.size()},
                  {"ok", ok},
                  {"infeasible", infeasible},
                  {"invalid", invalid},
                  {"flagged", flagged}};

  auto scenarios = nlohmann::ordered_json::array();
  for (const auto& s : stats.scenarios) {
    nlohmann::ordered_json js;
    js["scenario"] = s.scenario;
    js["capital_costs"] = to_string(s.capital);
    js["markets"] = s.markets;
    js["excluded"] = s.excluded;
    js["notices"] = s.notices;
    auto groups = nlohmann::ordered_json::array();
    for (const auto& g : s.groups) {
      nlohmann::ordered_json jg;
      jg["commodity_group"] = to_string(g.commodity);
      jg["markets"] = g.metrics.empty() ? 0 : g.metrics.front().stats.count;
      auto& jm = jg["metrics"] = nlohmann::ordered_json::object();
      for (const auto& m : g.metrics) {
        jm[std::string(to_string(m.metric))] = {{"mean", m.stats.mean},
                                                {"std", m.stats.std},
                                                {"p25", m.stats.p25},
                                                {"median", m.stats.median},
                                                {"p75", m.stats.p75}};
      }
      groups.push_back(std::move(jg));
    }
    js["groups"] = std::move(groups);
    scenarios.push_back(std::move(js));
  }
  j["scenarios"] = std::move(scenarios);
  out << j.dump(2) << '\n';
}

}  // namespace tender
