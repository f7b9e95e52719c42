#include "tender/fixtures.hpp"

#include <array>
#include <string>

#include "tender/errors.hpp"

namespace tender {

namespace {

constexpr std::array<std::string_view, 3> kNames = {"intermodal", "automotive", "coal"};

MarketRecord make(std::string id, Commodity c, double distance, double t0, double length,
                  double demand, double alpha, double h, int locomotives, double gross) {
  MarketRecord r;
  r.market_id = std::move(id);
  r.railroad = "BNSF";
  r.region = Region::Western;
  r.commodity = c;
  r.distance = distance;
  r.t0 = t0;
  r.train_length = length;
  r.annual_demand = demand;
  r.alpha = alpha;
  r.h_override = h;
  r.locomotives = locomotives;
  r.gross_tons = gross;
  return r;
}

}  // namespace

MarketRecord linehaul_fixture(std::string_view name) {
  if (name == "intermodal") {
    auto r = make("LAX-CHI-intermodal", Commodity::Intermodal, 2300, 75.7, 118, 1500, 10.4, 32,
                  1, 1600);
    r.origin = "Los Angeles";
    r.destination = "Chicago";
    return r;
  }
  if (name == "automotive") {
    auto r = make("LAX-CHI-automotive", Commodity::MotorVehicles, 2300, 109, 118, 3000, 10.4,
                  9.5, 1, 1600);
    r.origin = "Los Angeles";
    r.destination = "Chicago";
    return r;
  }
  if (name == "coal") {
    // Five locomotives share the 73-car train; the published range is per
    // locomotive with one tender behind each.
    auto r = make("PRB-CHI-coal", Commodity::Coal, 1400, 70.7, 73, 1000, 1.3, 9.5, 5, 2540);
    r.origin = "Powder River Basin";
    r.destination = "Chicago";
    return r;
  }
  throw LookupError("unknown fixture '" + std::string(name) +
                    "'; valid: intermodal, automotive, coal");
}

std::span<const std::string_view> linehaul_fixture_names() noexcept { return kNames; }

}  // namespace tender
