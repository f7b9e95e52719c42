#pragma once

#include <string_view>

// Generated from core/data at configure time.
namespace tender::bundled {

std::string_view tech_defaults() noexcept;
std::string_view energy_requirements() noexcept;
std::string_view train_speeds() noexcept;
std::string_view results_schema() noexcept;

}  // namespace tender::bundled
