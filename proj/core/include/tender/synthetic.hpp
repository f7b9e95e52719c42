#pragma once

// Seeded generator of synthetic market records.  Each commodity group has
// its own profile (locomotives, cars per locomotive, weight ratio, distance,
// speed, gross tons per locomotive, demand); output depends only on the
// options, never on the platform's <random> distributions.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tender/market_pipeline.hpp"

namespace tender {

struct SyntheticOptions {
  std::size_t count = 22501;
  std::uint64_t seed = 20190601;
};

std::vector<MarketRecord> generate_markets(const SyntheticOptions& options = {});

}  // namespace tender
