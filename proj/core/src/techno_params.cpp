#include "tender/techno_params.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bundled_data.hpp"
#include "tender/errors.hpp"
#include "text.hpp"

namespace tender {

namespace {

constexpr std::array kCommodities = {
    Commodity::AgriculturalFoods, Commodity::ChemicalPetroleum, Commodity::Coal,
    Commodity::ForestProducts,    Commodity::Intermodal,        Commodity::MetalsOres,
    Commodity::MotorVehicles,     Commodity::NonmetallicProducts, Commodity::Others,
};

struct TechField {
  std::string_view key;
  std::string_view unit;
  double TechInputs::*member;  // null for the boolean switch
};

// Order and unit comments define the canonical file layout.
constexpr std::array kTechFields = {
    TechField{"tender_weight", "ton per battery tender car", &TechInputs::tender_weight},
    TechField{"battery_capacity", "MWh", &TechInputs::battery_capacity},
    TechField{"charger_power", "MW", &TechInputs::charger_power},
    TechField{"charging_depth", "fraction of capacity cycled per charge", &TechInputs::charging_depth},
    TechField{"battery_efficiency", "fraction", &TechInputs::battery_efficiency},
    TechField{"battery_capital", "USD, battery + inverter + boxcar", &TechInputs::battery_capital},
    TechField{"battery_future_capital", "USD per replacement battery", &TechInputs::battery_future_capital},
    TechField{"battery_maintenance", "USD per day", &TechInputs::battery_maintenance},
    TechField{"battery_lifetime", "years", &TechInputs::battery_lifetime},
    TechField{"relative_efficiency", "battery-electric vs diesel, dimensionless", &TechInputs::relative_efficiency},
    TechField{"discount_rate", "per year, continuous", &TechInputs::discount_rate},
    TechField{"battery_horizon", "years", &TechInputs::battery_horizon},
    TechField{"electricity_price", "USD per kWh", &TechInputs::electricity_price},
    TechField{"grid_intensity", "kg CO2-eq per kWh", &TechInputs::grid_intensity},
    TechField{"carbon_price", "USD per ton CO2-eq", &TechInputs::carbon_price},
    TechField{"loco_utilization", "fraction of hours in road service", &TechInputs::loco_utilization},
    TechField{"loco_new_cost", "USD, five-year average", &TechInputs::loco_new_cost},
    TechField{"loco_annual_capital", "USD per year", &TechInputs::loco_annual_capital},
    TechField{"loco_annual_operating", "USD per year", &TechInputs::loco_annual_operating},
    TechField{"loco_annual_total", "USD per year", &TechInputs::loco_annual_total},
    TechField{"loco_cost_of_capital", "per year", &TechInputs::loco_cost_of_capital},
    TechField{"loco_horizon", "years", &TechInputs::loco_horizon},
    TechField{"initial_stop_time", "hours at origin", &TechInputs::initial_stop_time},
    TechField{"nominal_payload", "tons per locomotive", &TechInputs::nominal_payload},
    TechField{"diesel_price", "USD per gallon", &TechInputs::diesel_price},
    TechField{"diesel_lhv", "BTU per gallon", &TechInputs::diesel_lhv},
    TechField{"diesel_emission", "kg CO2-eq per gallon", &TechInputs::diesel_emission},
    TechField{"swap_stop_time", "hours per battery swap", &TechInputs::swap_stop_time},
    TechField{"bill_grid_side", "1 = bill charging energy at the grid (divide by efficiency)", nullptr},
};

template <typename Names>
std::string join_names(const Names& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double require_number(std::string_view field, std::string_view what, std::size_t line_no) {
  const auto v = text::parse_double(field);
  if (!v || !std::isfinite(*v)) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + std::string(what) +
                          ": not a number: '" + std::string(field) + "'");
  }
  return *v;
}

void check_header(const std::vector<std::string>& lines, std::string_view expected,
                  std::string_view what) {
  if (lines.empty() || text::trim(lines.front()) != expected) {
    throw ValidationError(std::string(what) + ": header must be '" + std::string(expected) +
                          "'");
  }
}

}  // namespace

std::string_view to_string(Region r) noexcept {
  return r == Region::Western ? "Western" : "Eastern";
}

std::string_view to_string(Commodity c) noexcept {
  switch (c) {
    case Commodity::AgriculturalFoods: return "Agricultural & Foods";
    case Commodity::ChemicalPetroleum: return "Chemical & Petroleum";
    case Commodity::Coal: return "Coal";
    case Commodity::ForestProducts: return "Forest Products";
    case Commodity::Intermodal: return "Intermodal";
    case Commodity::MetalsOres: return "Metals & Ores";
    case Commodity::MotorVehicles: return "Motor Vehicles";
    case Commodity::NonmetallicProducts: return "Nonmetallic Products";
    case Commodity::Others: return "Others";
  }
  return "Others";
}

Region parse_region(std::string_view s) {
  s = text::trim(s);
  if (s == "Western") return Region::Western;
  if (s == "Eastern") return Region::Eastern;
  throw LookupError("unknown region '" + std::string(s) + "'; valid: Western, Eastern");
}

Commodity parse_commodity(std::string_view s) {
  s = text::trim(s);
  for (const auto c : kCommodities) {
    if (to_string(c) == s) return c;
  }
  std::vector<std::string_view> names;
  for (const auto c : kCommodities) names.push_back(to_string(c));
  throw LookupError("unknown commodity group '" + std::string(s) +
                    "'; valid: " + join_names(names));
}

std::span<const Commodity> all_commodities() noexcept { return kCommodities; }

void TechInputs::validate() const {
  for (const auto& f : kTechFields) {
    if (!f.member) continue;
    const double v = this->*f.member;
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("tech parameter " + std::string(f.key) + " must be finite and >= 0");
    }
  }
  auto fraction = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw ValidationError(std::string("tech parameter ") + name + " must lie in (0, 1]");
    }
  };
  fraction(charging_depth, "charging_depth");
  fraction(battery_efficiency, "battery_efficiency");
  fraction(loco_utilization, "loco_utilization");
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ValidationError(std::string("tech parameter ") + name + " must be > 0");
  };
  positive(battery_capacity, "battery_capacity");
  positive(relative_efficiency, "relative_efficiency");
  positive(battery_lifetime, "battery_lifetime");
  positive(battery_horizon, "battery_horizon");
  positive(diesel_lhv, "diesel_lhv");
}

std::vector<std::string_view> tech_keys() {
  std::vector<std::string_view> keys;
  for (const auto& f : kTechFields) keys.push_back(f.key);
  return keys;
}

void set_tech_value(TechInputs& tech, std::string_view key, double value) {
  for (const auto& f : kTechFields) {
    if (f.key != key) continue;
    if (f.member) {
      tech.*f.member = value;
    } else if (value == 0.0 || value == 1.0) {
      tech.bill_grid_side = value == 1.0;
    } else {
      throw ValidationError(std::string(key) + " must be 0 or 1");
    }
    return;
  }
  throw ValidationError("unknown tech parameter '" + std::string(key) +
                        "'; valid: " + join_names(tech_keys()));
}

TechInputs parse_tech_inputs(std::istream& in, TechInputs base) {
  std::size_t line_no = 0;
  for (const auto& raw : read_lines(in)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = text::trim(line.substr(0, eq));
    const double value = require_number(line.substr(eq + 1), key, line_no);
    try {
      set_tech_value(base, key, value);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

TechInputs load_tech_inputs(const std::string& path, TechInputs base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tech parameter file " + path);
  return parse_tech_inputs(in, base);
}

void write_tech_inputs(std::ostream& out, const TechInputs& tech) {
  out << "# Battery-electric tender technology and cost parameters, 2019 USD.\n"
      << "# Format: key = value  # unit\n";
  for (const auto& f : kTechFields) {
    const double v = f.member ? tech.*f.member : (tech.bill_grid_side ? 1.0 : 0.0);
    out << f.key << " = " << text::format_double(v) << "  # " << f.unit << '\n';
  }
}

std::string_view bundled_tech_defaults() noexcept { return bundled::tech_defaults(); }
std::string_view bundled_energy_csv() noexcept { return bundled::energy_requirements(); }
std::string_view bundled_speed_csv() noexcept { return bundled::train_speeds(); }

CommodityEnergyTable CommodityEnergyTable::bundled() {
  std::istringstream energy{std::string(bundled_energy_csv())};
  std::istringstream speeds{std::string(bundled_speed_csv())};
  return parse(energy, speeds);
}

CommodityEnergyTable CommodityEnergyTable::parse(std::istream& energy_csv,
                                                 std::istream& speed_csv) {
  CommodityEnergyTable table;

  const auto energy = read_lines(energy_csv);
  check_header(energy, "commodity,region,btu_per_ton_mile", "energy table");
  for (std::size_t i = 1; i < energy.size(); ++i) {
    if (text::trim(energy[i]).empty()) continue;
    const auto f = text::split_csv(energy[i]);
    if (f.size() != 3) {
      throw ValidationError("energy table line " + std::to_string(i + 1) + ": expected 3 fields");
    }
    const auto key = std::make_pair(parse_commodity(f[0]), parse_region(f[1]));
    table.energy_.emplace_back(key, require_number(f[2], "btu_per_ton_mile", i + 1));
  }

  const auto speeds = read_lines(speed_csv);
  check_header(speeds, "railroad,train_type,mph", "speed table");
  for (std::size_t i = 1; i < speeds.size(); ++i) {
    if (text::trim(speeds[i]).empty()) continue;
    const auto f = text::split_csv(speeds[i]);
    if (f.size() != 3) {
      throw ValidationError("speed table line " + std::to_string(i + 1) + ": expected 3 fields");
    }
    table.speeds_.emplace_back(std::make_pair(f[0], f[1]), require_number(f[2], "mph", i + 1));
  }
  return table;
}

double CommodityEnergyTable::energy_requirement(Commodity c, Region r) const {
  for (const auto& [key, value] : energy_) {
    if (key.first == c && key.second == r) return value;
  }
  std::vector<std::string> valid;
  for (const auto& [key, value] : energy_) {
    valid.push_back(std::string(to_string(key.first)) + "/" + std::string(to_string(key.second)));
  }
  throw LookupError("no energy requirement for " + std::string(to_string(c)) + "/" +
                    std::string(to_string(r)) + "; valid: " + join_names(valid));
}

double CommodityEnergyTable::speed(std::string_view railroad, std::string_view train_type) const {
  for (const auto& [key, value] : speeds_) {
    if (key.first == railroad && key.second == train_type) return value;
  }
  std::vector<std::string> valid;
  for (const auto& [key, value] : speeds_) valid.push_back(key.first + "/" + key.second);
  throw LookupError("no speed for " + std::string(railroad) + "/" + std::string(train_type) +
                    "; valid: " + join_names(valid));
}

void CommodityEnergyTable::write_energy_csv(std::ostream& out) const {
  out << "commodity,region,btu_per_ton_mile\n";
  for (const auto& [key, value] : energy_) {
    out << text::csv_escape(to_string(key.first)) << ',' << to_string(key.second) << ','
        << text::format_double(value) << '\n';
  }
}

void CommodityEnergyTable::write_speed_csv(std::ostream& out) const {
  out << "railroad,train_type,mph\n";
  for (const auto& [key, value] : speeds_) {
    out << text::csv_escape(key.first) << ',' << text::csv_escape(key.second) << ','
        << text::format_double(value) << '\n';
  }
}

double effective_capacity(const TechInputs& tech) {
  return tech.battery_capacity * tech.charging_depth * tech.battery_efficiency;
}

double stop_time(const TechInputs& tech, const StopMode& mode) {
  if (const auto* swap = std::get_if<Swapping>(&mode)) {
    if (!(swap->hours >= 0.0)) throw ValidationError("swap time must be >= 0");
    return swap->hours;
  }
  if (!(tech.charger_power > 0.0)) {
    throw ValidationError("charger_power must be > 0 for plug-in charging");
  }
  return tech.battery_capacity * tech.charging_depth / tech.charger_power;
}

double charge_energy_per_stop(const TechInputs& tech) {
  const double kwh = tech.battery_capacity * tech.charging_depth * 1000.0;
  return tech.bill_grid_side ? kwh / tech.battery_efficiency : kwh;
}

double charge_cost_per_stop(const TechInputs& tech) {
  const double kwh = charge_energy_per_stop(tech);
  return kwh * tech.electricity_price + kwh * tech.grid_intensity * tech.carbon_price / 1000.0;
}

double energy_per_ton_mile(const TechInputs& tech, const CommodityEnergyTable& table,
                           Commodity commodity, Region region) {
  return table.energy_requirement(commodity, region) / tech.relative_efficiency / kBtuPerKwh;
}

double range_per_tender(const TechInputs& tech, const CommodityEnergyTable& table,
                        Commodity commodity, Region region, double gross_tons) {
  if (!(gross_tons > 0.0)) throw ValidationError("gross_tons must be > 0");
  return effective_capacity(tech) * 1000.0 /
         (energy_per_ton_mile(tech, table, commodity, region) * gross_tons);
}

EquipmentCostBreakdown equipment_cost_breakdown(const EquipmentCost& e) {
  if (!(e.lifetime > 0.0) || !(e.horizon > 0.0)) {
    throw ValidationError("equipment lifetime and horizon must be > 0");
  }
  if (!(e.rate >= 0.0)) throw ValidationError("discount rate must be >= 0");
  if (!(e.utilization > 0.0 && e.utilization <= 1.0)) {
    throw ValidationError("utilization must lie in (0, 1]");
  }
  const double cycles = e.horizon / e.lifetime;
  const double whole = std::round(cycles);
  if (whole < 1.0 || std::fabs(cycles - whole) > 1e-9 * whole) {
    throw ValidationError("horizon " + text::format_double(e.horizon) +
                          " is not a whole multiple of lifetime " +
                          text::format_double(e.lifetime));
  }

  EquipmentCostBreakdown out;
  out.replacements = static_cast<int>(whole) - 1;
  if (e.rate > 0.0) {
    const double horizon_factor = -std::expm1(-e.rate * e.horizon);  // 1 - e^{-rT}
    out.npv = e.capital;
    for (int j = 1; j <= out.replacements; ++j) {
      out.npv += e.future_capital * std::exp(-e.rate * j * e.lifetime);
    }
    out.npv += e.annual_maintenance * horizon_factor / e.rate;
    out.annual = out.npv * e.rate / horizon_factor;
  } else {
    out.npv = e.capital + out.replacements * e.future_capital + e.annual_maintenance * e.horizon;
    out.annual = out.npv / e.horizon;
  }
  out.hourly = out.annual / (e.utilization * kHoursPerYear);
  return out;
}

double hourly_equipment_cost(const EquipmentCost& e) {
  return equipment_cost_breakdown(e).hourly;
}

double hourly_rate_from_annual(double annual_cost, double utilization) {
  if (!(utilization > 0.0 && utilization <= 1.0)) {
    throw ValidationError("utilization must lie in (0, 1]");
  }
  return annual_cost / (utilization * kHoursPerYear);
}

EquipmentCost battery_equipment(const TechInputs& tech) {
  return {tech.battery_capital,
          tech.battery_future_capital,
          tech.battery_maintenance * kDaysPerYear,
          tech.battery_lifetime,
          tech.battery_horizon,
          tech.discount_rate,
          tech.loco_utilization};
}

double battery_hourly_cost(const TechInputs& tech) {
  return hourly_equipment_cost(battery_equipment(tech));
}

double locomotive_hourly_cost(const TechInputs& tech) {
  return hourly_rate_from_annual(tech.loco_annual_total, tech.loco_utilization);
}

std::string_view to_string(TrainType t) noexcept {
  switch (t) {
    case TrainType::Unit: return "unit";
    case TrainType::Manifest: return "manifest";
    case TrainType::Intermodal: return "intermodal";
  }
  return "manifest";
}

TrainType train_type_for(Commodity c) noexcept {
  switch (c) {
    case Commodity::Intermodal: return TrainType::Intermodal;
    case Commodity::Coal:
    case Commodity::MotorVehicles:
    case Commodity::AgriculturalFoods: return TrainType::Unit;
    default: return TrainType::Manifest;
  }
}

double delay_cost_lookup(TrainType type, double distance) {
  if (!(distance > 0.0)) throw ValidationError("distance must be > 0");
  switch (type) {
    case TrainType::Unit: return 8.42;
    case TrainType::Manifest: return 17.57;
    case TrainType::Intermodal:
      if (distance <= 1000.0) return 26.06;
      if (distance <= 1500.0) return 26.95;
      return 28.36;
  }
  return 17.57;
}

double nominal_trip_time(double distance, double speed, double initial_stop) {
  if (!(speed > 0.0)) throw ValidationError("speed must be > 0");
  return distance / speed + initial_stop;
}

DieselBaseline diesel_baseline(const DieselMarket& m, const CommodityEnergyTable& table,
                               const TechInputs& tech) {
  if (!m.gross_tons) throw ValidationError("diesel baseline needs gross tonnage per locomotive");
  if (!(m.distance > 0.0) || !(m.demand > 0.0) || !(m.train_length > 0.0) ||
      m.locomotives < 1) {
    throw ValidationError("diesel baseline needs positive distance, demand, train length and "
                          "locomotive count");
  }
  DieselBaseline d;
  d.trips = m.demand / m.train_length;
  d.trip_time = m.nominal_time;
  const double ton_miles = *m.gross_tons * m.locomotives * m.distance * d.trips;
  d.gallons = ton_miles * table.energy_requirement(m.commodity, m.region) / tech.diesel_lhv;
  d.fuel_cost = d.gallons * (tech.diesel_price + tech.diesel_emission * tech.carbon_price / 1000.0);
  d.locomotive_cost = m.locomotives * locomotive_hourly_cost(tech) * d.trip_time * d.trips;
  d.total = d.fuel_cost + d.locomotive_cost;
  return d;
}

}  // namespace tender
