#pragma once

// The three linehaul examples as market records.  Gross tonnage per
// locomotive is the value that makes the derived tender range match the
// published one (coal 320 mi, intermodal 62 mi, automotive 76 mi).

#include <span>
#include <string_view>

#include "tender/market_pipeline.hpp"

namespace tender {

// "coal", "intermodal" or "automotive"; throws LookupError otherwise.
MarketRecord linehaul_fixture(std::string_view name);
std::span<const std::string_view> linehaul_fixture_names() noexcept;

}  // namespace tender
