#pragma once

// Results CSV and aggregates JSON writers.  Both start with the same run
// metadata so a file can be traced back to its inputs.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tender/market_pipeline.hpp"

namespace tender {

std::string_view library_version() noexcept;

inline constexpr std::string_view kPercentileRule =
    "linear interpolation between order statistics, h = (n - 1) q";

struct RunMetadata {
  std::string tool_version{library_version()};
  std::vector<std::string> scenarios;  // ScenarioSpec::describe()
  std::string input_checksum;          // fnv1a64:<16 hex digits>
  std::string percentile_rule{kPercentileRule};
  std::vector<std::pair<std::string, std::string>> config;  // effective settings
};

// "fnv1a64:" followed by 16 lowercase hex digits.
std::string checksum(std::string_view bytes);

// Column names of the results CSV, in order.
std::span<const std::string_view> result_columns() noexcept;
// JSON document describing each results column.
std::string_view results_schema() noexcept;

void write_results_csv(std::ostream& out, std::span<const BatchResult> results,
                       const RunMetadata& meta);
// Flagged (infeasible or invalid) results are counted and listed alongside
// the statistics they were excluded from.
void write_aggregates_json(std::ostream& out, const AggregateStats& stats,
                           std::span<const BatchResult> results, const RunMetadata& meta);

}  // namespace tender
