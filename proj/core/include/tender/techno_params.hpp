#pragma once

// Derivation of model parameters (range, stop time, per-stop energy cost,
// hourly equipment rates, delay cost, diesel baseline) from technology and
// finance inputs.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tender {

inline constexpr double kBtuPerKwh = 3412.14;
inline constexpr double kHoursPerYear = 8760.0;
inline constexpr double kDaysPerYear = 365.0;

enum class Region { Western, Eastern };

enum class Commodity {
  AgriculturalFoods,
  ChemicalPetroleum,
  Coal,
  ForestProducts,
  Intermodal,
  MetalsOres,
  MotorVehicles,
  NonmetallicProducts,
  Others,
};

std::string_view to_string(Region r) noexcept;
std::string_view to_string(Commodity c) noexcept;
// Both throw LookupError naming the valid spellings.
Region parse_region(std::string_view s);
Commodity parse_commodity(std::string_view s);
std::span<const Commodity> all_commodities() noexcept;

struct TechInputs {
  double tender_weight = 150;            // ton
  double battery_capacity = 14;          // MWh
  double charger_power = 3;              // MW
  double charging_depth = 0.8;           // (0, 1]
  double battery_efficiency = 0.95;      // (0, 1]
  double battery_capital = 1271816;      // USD
  double battery_future_capital = 452908;  // USD
  double battery_maintenance = 100;      // USD per day
  double battery_lifetime = 13;          // years
  double relative_efficiency = 2.44;
  double discount_rate = 0.03;
  double battery_horizon = 26;           // years
  double electricity_price = 0.15;       // USD per kWh
  double grid_intensity = 0.387;         // kg CO2-eq per kWh
  double carbon_price = 125;             // USD per ton CO2-eq
  double loco_utilization = 0.25;
  double loco_new_cost = 2560000;
  double loco_annual_capital = 389000;
  double loco_annual_operating = 127000;
  double loco_annual_total = 516000;     // USD per year
  double loco_cost_of_capital = 0.0934;
  double loco_horizon = 20;              // years
  double initial_stop_time = 4;          // hours
  double nominal_payload = 1700;         // tons per locomotive
  double diesel_price = 2.47;            // USD per gallon
  double diesel_lhv = 129488;            // BTU per gallon
  double diesel_emission = 12.36;        // kg CO2-eq per gallon
  double swap_stop_time = 0.5;           // hours
  bool bill_grid_side = false;

  void validate() const;
};

// Key/value text ("key = value  # unit").  Keys missing from the stream keep
// their value from `base`; unknown keys and bad numbers throw
// ValidationError with the line number.
TechInputs parse_tech_inputs(std::istream& in, TechInputs base = {});
TechInputs load_tech_inputs(const std::string& path, TechInputs base = {});
void write_tech_inputs(std::ostream& out, const TechInputs& tech);
std::string_view bundled_tech_defaults() noexcept;

// Sets a single parameter by key; throws ValidationError for unknown keys.
void set_tech_value(TechInputs& tech, std::string_view key, double value);
std::vector<std::string_view> tech_keys();

class CommodityEnergyTable {
 public:
  static CommodityEnergyTable bundled();
  // CSV with headers commodity,region,btu_per_ton_mile and
  // railroad,train_type,mph.
  static CommodityEnergyTable parse(std::istream& energy_csv, std::istream& speed_csv);

  double energy_requirement(Commodity c, Region r) const;  // BTU per ton-mile
  double speed(std::string_view railroad, std::string_view train_type) const;  // mph

  void write_energy_csv(std::ostream& out) const;
  void write_speed_csv(std::ostream& out) const;

 private:
  std::vector<std::pair<std::pair<Commodity, Region>, double>> energy_;
  std::vector<std::pair<std::pair<std::string, std::string>, double>> speeds_;
};

std::string_view bundled_energy_csv() noexcept;
std::string_view bundled_speed_csv() noexcept;

// Usable energy per tender: capacity x depth x efficiency, MWh.
double effective_capacity(const TechInputs& tech);

struct Charging {};  // plug-in charging at tech.charger_power
struct Swapping {
  double hours = 0.5;
};
using StopMode = std::variant<Charging, Swapping>;

// Charging: energy recharged per stop (capacity x depth) over charger power.
double stop_time(const TechInputs& tech, const StopMode& mode);

// Energy bill plus carbon cost of recharging one tender, USD.  Energy is
// metered at the battery (capacity x depth) unless tech.bill_grid_side.
double charge_cost_per_stop(const TechInputs& tech);
// Billed energy per stop, kWh.
double charge_energy_per_stop(const TechInputs& tech);

// Battery-side energy per gross ton-mile, kWh: BTU/ton-mile of diesel
// over the relative efficiency and 3412.14 BTU/kWh.
double energy_per_ton_mile(const TechInputs& tech, const CommodityEnergyTable& table,
                           Commodity commodity, Region region);

// Miles one tender moves `gross_tons` on one locomotive.
double range_per_tender(const TechInputs& tech, const CommodityEnergyTable& table,
                        Commodity commodity, Region region, double gross_tons);

struct EquipmentCost {
  double capital = 0.0;             // USD at t = 0
  double future_capital = 0.0;      // USD per replacement at t = lifetime, 2 lifetime, ...
  double annual_maintenance = 0.0;  // USD per year, continuous
  double lifetime = 1.0;            // years
  double horizon = 1.0;             // years, a whole multiple of lifetime
  double rate = 0.0;                // continuous discount rate per year
  double utilization = 1.0;         // fraction of hours in service
};

// Equivalent uniform cost per in-service hour: continuously discounted NPV,
// annualized over the horizon, spread over utilization x 8760 hours.
double hourly_equipment_cost(const EquipmentCost& e);

struct EquipmentCostBreakdown {
  int replacements = 0;
  double npv = 0.0;     // capital + discounted replacements + maintenance
  double annual = 0.0;  // uniform annual equivalent over the horizon
  double hourly = 0.0;
};

EquipmentCostBreakdown equipment_cost_breakdown(const EquipmentCost& e);

double hourly_rate_from_annual(double annual_cost, double utilization);

EquipmentCost battery_equipment(const TechInputs& tech);
double battery_hourly_cost(const TechInputs& tech);
double locomotive_hourly_cost(const TechInputs& tech);

enum class TrainType { Unit, Manifest, Intermodal };

std::string_view to_string(TrainType t) noexcept;
TrainType train_type_for(Commodity c) noexcept;

// Hourly delay cost per car by trip-distance band (upper edges inclusive).
double delay_cost_lookup(TrainType type, double distance);

double nominal_trip_time(double distance, double speed, double initial_stop);

struct DieselMarket {
  double distance = 0.0;
  double demand = 0.0;
  double train_length = 0.0;
  int locomotives = 1;
  double nominal_time = 0.0;
  std::optional<double> gross_tons;  // per locomotive
  Commodity commodity = Commodity::Others;
  Region region = Region::Western;
};

struct DieselBaseline {
  double trips = 0.0;
  double trip_time = 0.0;
  double gallons = 0.0;
  double fuel_cost = 0.0;        // incl. emissions
  double locomotive_cost = 0.0;
  double total = 0.0;
};

DieselBaseline diesel_baseline(const DieselMarket& market, const CommodityEnergyTable& table,
                               const TechInputs& tech);

}  // namespace tender
