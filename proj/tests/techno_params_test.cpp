#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tender/errors.hpp"
#include "tender/fixtures.hpp"
#include "tender/techno_params.hpp"

namespace tender {
namespace {

const CommodityEnergyTable& table() {
  static const auto t = CommodityEnergyTable::bundled();
  return t;
}

TEST(EffectiveCapacity, Examples) {
  TechInputs t;
  EXPECT_DOUBLE_EQ(effective_capacity(t), 14 * 0.8 * 0.95);
  EXPECT_NEAR(effective_capacity(t), 10.64, 1e-12);
  t.charging_depth = 1;
  t.battery_efficiency = 1;
  EXPECT_DOUBLE_EQ(effective_capacity(t), 14.0);
  t.battery_capacity = 10;
  t.charging_depth = 0.5;
  t.battery_efficiency = 0.9;
  EXPECT_DOUBLE_EQ(effective_capacity(t), 4.5);
}

TEST(StopTime, ChargeSwapAndSlowCharger) {
  TechInputs t;
  EXPECT_NEAR(stop_time(t, Charging{}), 3.7333333333, 1e-9);
  EXPECT_DOUBLE_EQ(stop_time(t, Swapping{0.5}), 0.5);
  t.charger_power = 0.4;
  EXPECT_NEAR(stop_time(t, Charging{}), 28.0, 1e-12);
  t.charger_power = 0;
  EXPECT_THROW(stop_time(t, Charging{}), ValidationError);
}

TEST(StopTime, TimesPowerIsRechargedEnergy) {
  for (const double power : {0.4, 1.0, 3.0, 7.5}) {
    TechInputs t;
    t.charger_power = power;
    EXPECT_DOUBLE_EQ(stop_time(t, Charging{}) * power, t.battery_capacity * t.charging_depth);
  }
}

TEST(ChargeCost, DefaultsAndZeroCarbon) {
  TechInputs t;
  EXPECT_NEAR(charge_cost_per_stop(t), 2221.8, 1e-9);
  EXPECT_NEAR(charge_energy_per_stop(t), 11200.0, 1e-9);
  t.carbon_price = 0;
  EXPECT_NEAR(charge_cost_per_stop(t), 1680.0, 1e-9);
  t = TechInputs{};
  t.grid_intensity = 0;
  EXPECT_NEAR(charge_cost_per_stop(t), 1680.0, 1e-9);
}

TEST(ChargeCost, GridSideBillingDividesByEfficiency) {
  TechInputs t;
  t.bill_grid_side = true;
  EXPECT_NEAR(charge_cost_per_stop(t), 2221.8 / 0.95, 1e-9);
}

TEST(Range, LinehaulTonnages) {
  TechInputs t;
  EXPECT_NEAR(range_per_tender(t, table(), Commodity::Coal, Region::Western, 2540), 320, 3.2);
  EXPECT_NEAR(range_per_tender(t, table(), Commodity::Intermodal, Region::Western, 1600), 62,
              1.24);
  EXPECT_NEAR(range_per_tender(t, table(), Commodity::MotorVehicles, Region::Western, 1600), 76,
              1.52);
}

TEST(Range, InversionFormula) {
  TechInputs t;
  const double btu = table().energy_requirement(Commodity::Coal, Region::Western);
  const double expected = 10640.0 / (btu / 2.44 / 3412.14 * 2540);
  EXPECT_NEAR(range_per_tender(t, table(), Commodity::Coal, Region::Western, 2540), expected,
              1e-9 * expected);
}

TEST(Range, UnitCancellation) {
  TechInputs t;
  t.relative_efficiency = 1;
  std::istringstream energy("commodity,region,btu_per_ton_mile\nCoal,Western,3412.14\n");
  std::istringstream speed("railroad,train_type,mph\n");
  const auto custom = CommodityEnergyTable::parse(energy, speed);
  const double kwh = effective_capacity(t) * 1000;
  EXPECT_NEAR(range_per_tender(t, custom, Commodity::Coal, Region::Western, kwh), 1.0, 1e-12);
  EXPECT_THROW(range_per_tender(t, custom, Commodity::Intermodal, Region::Western, 1), LookupError);
}

TEST(Range, HomogeneousInTonnage) {
  TechInputs t;
  for (const auto c : all_commodities()) {
    const double r1 = range_per_tender(t, table(), c, Region::Eastern, 1000);
    const double r2 = range_per_tender(t, table(), c, Region::Eastern, 2000);
    EXPECT_DOUBLE_EQ(r1, 2 * r2);
  }
}

TEST(Lookup, ErrorsListValidKeys) {
  try {
    parse_commodity("Grain");
    FAIL();
  } catch (const LookupError& e) {
    EXPECT_NE(std::string(e.what()).find("Intermodal"), std::string::npos);
  }
  EXPECT_THROW(parse_region("Northern"), LookupError);
  for (const auto c : all_commodities()) EXPECT_EQ(parse_commodity(to_string(c)), c);
}

TEST(EquipmentCost, BatteryRate) {
  const auto b = equipment_cost_breakdown(battery_equipment(TechInputs{}));
  EXPECT_EQ(b.replacements, 1);
  // Independent evaluation of the continuous-discount NPV.
  const double r = 0.03;
  const double npv = 1271816 + 452908 * std::exp(-r * 13) + 36500 * (1 - std::exp(-r * 26)) / r;
  const double annual = npv * r / (1 - std::exp(-r * 26));
  EXPECT_NEAR(b.npv, npv, 1e-6 * npv);
  EXPECT_NEAR(b.annual, annual, 1e-6 * annual);
  EXPECT_NEAR(b.hourly, annual / (0.25 * 8760), 1e-9);
  EXPECT_NEAR(battery_hourly_cost(TechInputs{}), 56.6, 0.05);
  EXPECT_LE(std::fabs(battery_hourly_cost(TechInputs{}) - 58) / 58, 0.05);
}

TEST(EquipmentCost, LocomotiveShortcut) {
  EXPECT_NEAR(locomotive_hourly_cost(TechInputs{}), 516000 / (0.25 * 8760), 1e-9);
  EXPECT_LE(std::fabs(locomotive_hourly_cost(TechInputs{}) - 236) / 236, 0.01);
}

TEST(EquipmentCost, UndiscountedLimit) {
  EquipmentCost e;
  e.capital = 1000;
  e.annual_maintenance = 50;
  e.lifetime = 10;
  e.horizon = 10;
  e.rate = 0;
  e.utilization = 0.5;
  EXPECT_NEAR(hourly_equipment_cost(e), (100.0 + 50.0) / (0.5 * 8760), 1e-12);
  e.rate = 1e-9;
  const double near_zero = hourly_equipment_cost(e);
  e.rate = 0;
  EXPECT_LE(std::fabs(near_zero - hourly_equipment_cost(e)) / hourly_equipment_cost(e), 1e-6);
}

TEST(EquipmentCost, ContinuousAtZeroRateWithReplacements) {
  auto e = battery_equipment(TechInputs{});
  e.rate = 0;
  const double at_zero = hourly_equipment_cost(e);
  e.rate = 1e-9;
  EXPECT_LE(std::fabs(hourly_equipment_cost(e) - at_zero) / at_zero, 1e-6);
}

TEST(EquipmentCost, HorizonMustBeMultipleOfLifetime) {
  auto e = battery_equipment(TechInputs{});
  e.horizon = 20;
  EXPECT_THROW(hourly_equipment_cost(e), ValidationError);
}

TEST(DelayCost, Bands) {
  EXPECT_DOUBLE_EQ(delay_cost_lookup(TrainType::Intermodal, 2300), 28.36);
  EXPECT_DOUBLE_EQ(delay_cost_lookup(TrainType::Intermodal, 1000), 26.06);
  EXPECT_DOUBLE_EQ(delay_cost_lookup(TrainType::Intermodal, 1000.5), 26.95);
  EXPECT_DOUBLE_EQ(delay_cost_lookup(TrainType::Intermodal, 1500), 26.95);
  EXPECT_DOUBLE_EQ(delay_cost_lookup(TrainType::Intermodal, 1501), 28.36);
  EXPECT_DOUBLE_EQ(delay_cost_lookup(TrainType::Unit, 700), 8.42);
  EXPECT_DOUBLE_EQ(delay_cost_lookup(TrainType::Manifest, 1000), 17.57);
  EXPECT_THROW(delay_cost_lookup(TrainType::Unit, 0), ValidationError);
}

TEST(NominalTripTime, SpeedPlusInitialStop) {
  EXPECT_DOUBLE_EQ(nominal_trip_time(1000, 25, 4), 44.0);
  EXPECT_THROW(nominal_trip_time(1000, 0, 4), ValidationError);
}

DieselMarket coal_diesel() {
  const auto r = linehaul_fixture("coal");
  DieselMarket m;
  m.distance = r.distance;
  m.demand = r.annual_demand;
  m.train_length = r.train_length;
  m.locomotives = r.locomotives;
  m.nominal_time = *r.t0;
  m.gross_tons = r.gross_tons;
  m.commodity = r.commodity;
  m.region = r.region;
  return m;
}

TEST(Diesel, FuelPriceIncludesCarbon) {
  const auto d = diesel_baseline(coal_diesel(), table(), TechInputs{});
  EXPECT_NEAR(d.fuel_cost, d.gallons * (2.47 + 12.36 * 0.125), 1e-9 * d.fuel_cost);
  EXPECT_NEAR(d.fuel_cost / d.gallons, 4.015, 1e-12);
  TechInputs no_carbon;
  no_carbon.carbon_price = 0;
  const auto z = diesel_baseline(coal_diesel(), table(), no_carbon);
  EXPECT_NEAR(z.fuel_cost, z.gallons * 2.47, 1e-9 * z.fuel_cost);
  EXPECT_DOUBLE_EQ(d.total, d.fuel_cost + d.locomotive_cost);
}

TEST(Diesel, CoalTotalNearPublishedRow) {
  const auto d = diesel_baseline(coal_diesel(), table(), TechInputs{});
  EXPECT_LE(std::fabs(d.total - 2111418) / 2111418, 0.20) << d.total;
}

TEST(Diesel, MissingTonnage) {
  auto m = coal_diesel();
  m.gross_tons.reset();
  EXPECT_THROW(diesel_baseline(m, table(), TechInputs{}), ValidationError);
}

TEST(TechFile, BundledDefaultsRoundTrip) {
  std::istringstream in{std::string(bundled_tech_defaults())};
  const auto parsed = parse_tech_inputs(in);
  std::ostringstream out;
  write_tech_inputs(out, parsed);
  EXPECT_EQ(out.str(), bundled_tech_defaults());
  std::ostringstream defaults;
  write_tech_inputs(defaults, TechInputs{});
  EXPECT_EQ(defaults.str(), bundled_tech_defaults());
}

TEST(TechFile, BundledTablesRoundTrip) {
  std::ostringstream energy, speed;
  table().write_energy_csv(energy);
  table().write_speed_csv(speed);
  EXPECT_EQ(energy.str(), bundled_energy_csv());
  EXPECT_EQ(speed.str(), bundled_speed_csv());
}

TEST(TechFile, OverridesAndErrors) {
  std::istringstream in("# comment\ncharger_power = 0.4\n\n");
  const auto t = parse_tech_inputs(in);
  EXPECT_DOUBLE_EQ(t.charger_power, 0.4);
  EXPECT_DOUBLE_EQ(t.battery_capacity, 14);

  std::istringstream unknown("battery_capacity = 14\nwarp_factor = 9\n");
  try {
    parse_tech_inputs(unknown);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  std::istringstream bad("charger_power = fast\n");
  EXPECT_THROW(parse_tech_inputs(bad), ValidationError);
  std::istringstream depth("charging_depth = 1.5\n");
  EXPECT_THROW(parse_tech_inputs(depth).validate(), ValidationError);
  EXPECT_THROW(load_tech_inputs("/nonexistent/tech.conf"), IoError);
}

TEST(TechFile, EveryKeySettable) {
  for (const auto key : tech_keys()) {
    TechInputs t;
    EXPECT_NO_THROW(set_tech_value(t, key, 1.0)) << key;
  }
  TechInputs t;
  EXPECT_THROW(set_tech_value(t, "nope", 1), ValidationError);
}

TEST(TrainTypes, CommodityMapping) {
  EXPECT_EQ(train_type_for(Commodity::Coal), TrainType::Unit);
  EXPECT_EQ(train_type_for(Commodity::Intermodal), TrainType::Intermodal);
  EXPECT_EQ(train_type_for(Commodity::ChemicalPetroleum), TrainType::Manifest);
}

}  // namespace
}  // namespace tender
