#include <gtest/gtest.h>

#include "random_params.hpp"
#include "tender/errors.hpp"
#include "tender/fixtures.hpp"
#include "tender/general_model.hpp"
#include "tender/market_pipeline.hpp"
#include "tender/oracle.hpp"

namespace tender {
namespace {

using testing::ParamSampler;
using testing::rel_diff;

GeneralModelParams fixture_params(std::string_view name) {
  const auto table = CommodityEnergyTable::bundled();
  return derive_market(linehaul_fixture(name), TechInputs{}, table, ScenarioSpec{}).model;
}

// Direct k(n) form, written out independently of the library.
double direct_total(const GeneralModelParams& p, double n) {
  const auto& b = p.base;
  const double stops = b.distance / (b.tender_range * n);
  const double t = b.nominal_time + stops * b.stop_time;
  const double k = (p.locomotives * p.loco_rate + n * p.tender_rate) * t +
                   p.stop_energy_cost * n * stops;
  return k * b.demand / (b.train_length - b.alpha * n) + b.holding_cost * t * b.demand;
}

TEST(FixedCost, LocomotiveOnly) {
  auto p = fixture_params("coal");
  p.tender_rate = 0;
  p.stop_energy_cost = 0;
  for (const double n : {5.0, 7.5, 10.0}) {
    EXPECT_DOUBLE_EQ(fixed_cost(p, n), p.locomotives * p.loco_rate * trip_time(p.base, n));
  }
}

TEST(FixedCost, EnergyTermIndependentOfN) {
  auto p = fixture_params("intermodal");
  p.loco_rate = 0;
  p.tender_rate = 0;
  const double expected = p.stop_energy_cost * p.base.stop_ratio();
  for (const double n : {1.0, 2.0, 3.3, 8.0}) {
    EXPECT_LE(rel_diff(fixed_cost(p, n), expected), 1e-14);
  }
}

TEST(TotalCostGeneral, DirectRegroupedAndComponentsAgree) {
  ParamSampler s(21);
  for (int i = 0; i < 1000; ++i) {
    const auto p = s.general();
    const double n = s.uniform(1.0, p.base.max_tenders());
    const auto e = total_cost_general(p, n);
    EXPECT_LE(rel_diff(e.total_cost, direct_total(p, n)), 1e-10);
    EXPECT_LE(rel_diff(e.total_cost,
                       total_cost_regrouped(coefficients(p), p.base.train_length, p.base.alpha, n)),
              1e-10);
    double sum = 0;
    for (const auto& c : e.components) sum += c.value;
    EXPECT_LE(rel_diff(sum, e.total_cost), 1e-12);
    // k(n) Q / payload + h t(n) Q
    const double via_fixed = fixed_cost(p, n) * p.base.demand / e.payload +
                             p.base.holding_cost * e.trip_time * p.base.demand;
    EXPECT_LE(rel_diff(via_fixed, e.total_cost), 1e-10);
  }
}

TEST(TotalCostGeneral, DelayOnlyCase) {
  auto p = fixture_params("coal");
  p.loco_rate = p.tender_rate = p.stop_energy_cost = 0;
  const double n = 5;
  const auto e = total_cost_general(p, n);
  EXPECT_LE(rel_diff(e.total_cost, p.base.holding_cost * trip_time(p.base, n) * p.base.demand),
            1e-14);
}

TEST(TotalCostGeneral, NoStopCase) {
  auto p = fixture_params("automotive");
  p.base.holding_cost = 0;
  p.base.stop_time = 0;
  const auto& b = p.base;
  for (const double n : {1.0, 3.0, 6.0}) {
    const double u = b.train_length - b.alpha * n;
    const double expected = (p.locomotives * p.loco_rate + n * p.tender_rate) * b.nominal_time *
                                b.demand / u +
                            p.stop_energy_cost * b.stop_ratio() * b.demand / u;
    EXPECT_LE(rel_diff(total_cost_general(p, n).total_cost, expected), 1e-13);
  }
}

TEST(TotalCostGeneral, ComponentFormulas) {
  const auto p = fixture_params("coal");
  const auto& b = p.base;
  const double n = 10;
  const double u = b.train_length - b.alpha * n;
  const double g = b.train_length * n - b.alpha * n * n;
  const double stop_q = b.stop_ratio() * b.stop_time * b.demand;
  const auto e = total_cost_general(p, n);
  const double nl_cl = p.locomotives * p.loco_rate;
  EXPECT_LE(rel_diff(e.component("locomotive"), nl_cl * b.nominal_time * b.demand / u), 1e-14);
  EXPECT_LE(rel_diff(e.component("tender"), p.tender_rate * b.nominal_time * b.demand * n / u),
            1e-14);
  EXPECT_LE(rel_diff(e.component("charging"), p.stop_energy_cost * b.stop_ratio() * b.demand / u),
            1e-14);
  EXPECT_LE(rel_diff(e.component("delay"),
                     (nl_cl / g + p.tender_rate / u + b.holding_cost / n) * stop_q),
            1e-14);
  EXPECT_LE(rel_diff(e.component("constant"), b.holding_cost * b.nominal_time * b.demand), 1e-14);
}

TEST(TotalCostGeneral, InfeasibleCountThrows) {
  const auto p = fixture_params("intermodal");
  EXPECT_THROW(total_cost_general(p, 12), InfeasibleError);
  EXPECT_THROW(total_cost_general(p, 0.5), DomainError);
}

TEST(Coefficients, Definitions) {
  const auto p = fixture_params("coal");
  const auto& b = p.base;
  const auto c = coefficients(p);
  const double Q = b.demand;
  const double s = b.stop_ratio();
  EXPECT_DOUBLE_EQ(c.A, p.tender_rate * b.nominal_time * Q);
  EXPECT_DOUBLE_EQ(c.B, p.locomotives * p.loco_rate * s * b.stop_time * Q);
  EXPECT_LE(rel_diff(c.C, (p.locomotives * p.loco_rate * b.nominal_time +
                           p.tender_rate * s * b.stop_time + p.stop_energy_cost * s) *
                              Q),
            1e-15);
  EXPECT_DOUBLE_EQ(c.E, b.holding_cost * s * b.stop_time * Q);
  EXPECT_DOUBLE_EQ(c.F, b.holding_cost * b.nominal_time * Q);
}

TEST(OptimalGeneral, ReducesToSimpleClosedForm) {
  ParamSampler s(22);
  int interior = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto simple = s.simple();
    GeneralModelParams p;
    p.base = simple;
    // C = k Q and A = B = 0.
    p.stop_energy_cost = simple.dispatch_cost / simple.stop_ratio();
    const auto expected = optimal_n_continuous(simple);
    const auto got = optimal_n_general(p);
    if (expected.bound != Bound::Interior) continue;
    ++interior;
    // With A = B = 0 the leading coefficient is a (kQ - E a), which can be
    // non-positive; bounded search then stands in for the closed form.
    const auto c = coefficients(p);
    const bool closed = c.C * simple.alpha - c.E * simple.alpha * simple.alpha > 0;
    EXPECT_EQ(got.closed_form, closed) << "instance " << i;
    EXPECT_LE(std::fabs(got.n_continuous - expected.n), (closed ? 1e-9 : 1e-6) * expected.n)
        << "instance " << i;
    EXPECT_EQ(got.integer.n, optimal_n_integer(simple).n);
  }
  EXPECT_GT(interior, 100);
}

TEST(OptimalGeneral, LinehaulFixtures) {
  const auto coal = optimal_n_general(fixture_params("coal"), Granularity::per_locomotive(5));
  EXPECT_EQ(coal.integer.per_unit, 1);
  const auto inter =
      optimal_n_general(fixture_params("intermodal"), Granularity::per_locomotive(1));
  EXPECT_EQ(inter.integer.per_unit, 4);
  const auto autos =
      optimal_n_general(fixture_params("automotive"), Granularity::per_locomotive(1));
  EXPECT_EQ(autos.integer.per_unit, 3);
}

TEST(OptimalGeneral, AgreesWithGridTernaryAndIntegerScan) {
  ParamSampler s(23);
  int interior = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = s.general();
    const auto& b = p.base;
    const int multiple = s.integer(1, p.locomotives);
    if (max_feasible_multiple(b.train_length, b.alpha, multiple) < 1) continue;
    const auto opt = optimal_n_general(p, Granularity::per_locomotive(multiple));
    auto cost = [&](double n) { return total_cost_general(p, n).total_cost; };
    const double upper = b.max_tenders();
    const auto grid = oracle::grid_min(cost, {1.0, upper, 1e-3});
    EXPECT_LE(std::fabs(grid.n - opt.n_continuous), 1e-3) << "instance " << i;
    if (opt.bound == Bound::Interior) {
      ++interior;
      const double ternary = oracle::ternary_min(cost, 1.0, upper);
      EXPECT_LE(rel_diff(ternary, opt.n_continuous), 1e-6) << "instance " << i;
      const auto coarse = oracle::grid_min(cost, {1.0, upper, 1e-2});
      EXPECT_LE(std::fabs(coarse.n - opt.n_continuous), 1e-2) << "instance " << i;
    }
    const auto scan = oracle::integer_scan([&](int n) { return cost(n); }, b.train_length,
                                           b.alpha, multiple);
    ASSERT_EQ(opt.integer.n, scan.n) << "instance " << i;
  }
  EXPECT_GT(interior, 100);
}

TEST(OptimalGeneral, FallbackWhenLeadingCoefficientVanishes) {
  // A L + C a - E a^2 <= 0: the closed form is not used and bounded search
  // finds the minimum.
  GeneralModelParams p;
  p.base.distance = 3000;
  p.base.nominal_time = 0;
  p.base.train_length = 40;
  p.base.demand = 1000;
  p.base.tender_range = 10;
  p.base.alpha = 3;
  p.base.holding_cost = 50;
  p.base.stop_time = 20;
  p.locomotives = 1;
  p.loco_rate = 1;
  p.stop_energy_cost = 1;
  const auto c = coefficients(p);
  ASSERT_LE(c.A * 40 + c.C * 3 - c.E * 9, 0.0);
  EXPECT_FALSE(closed_form_candidate(c, 40, 3).has_value());
  auto cost = [&](double n) { return total_cost_general(p, n).total_cost; };
  const auto opt = optimal_n_general(p);
  EXPECT_FALSE(opt.closed_form);
  EXPECT_EQ(opt.bound, Bound::Interior);
  EXPECT_NEAR(opt.n_continuous, oracle::ternary_min(cost, 1.0, p.base.max_tenders()), 1e-6);
  EXPECT_LE(std::fabs(opt.n_continuous - oracle::grid_min(cost, {1.0, 13.0, 1e-3}).n), 1e-3);
  const auto scan = oracle::integer_scan([&](int n) { return cost(n); }, 40, 3);
  EXPECT_EQ(opt.integer.n, scan.n);

  // Heavier delay pushes the stationary point past (L - 1) / alpha.
  p.base.holding_cost = 5000;
  const auto upper = optimal_n_general(p);
  EXPECT_FALSE(upper.closed_form);
  EXPECT_EQ(upper.bound, Bound::Upper);
  EXPECT_DOUBLE_EQ(upper.n_continuous, p.base.max_tenders());
  EXPECT_LT(derivatives_general(p, p.base.max_tenders()).first, 0.0);
}

TEST(Monotonicity, ChargingDerivative) {
  const auto p = fixture_params("coal");
  const auto& b = p.base;
  const double n = 7;
  const auto r = monotonicity_certificate(p, n);
  const double u = b.train_length - b.alpha * n;
  EXPECT_LE(rel_diff(r.d_charging, p.stop_energy_cost * b.stop_ratio() * b.demand * b.alpha / (u * u)),
            1e-14);
  EXPECT_TRUE(r.charging_increasing);
  EXPECT_TRUE(r.locomotive_increasing);
  EXPECT_TRUE(r.tender_increasing);
}

TEST(Monotonicity, LargeHoldingCostMakesDelayDecrease) {
  auto p = fixture_params("intermodal");
  p.tender_rate = 0;
  p.base.holding_cost = 1e4;
  for (const double n : {1.0, 3.0, 6.0, 10.0}) {
    const auto r = monotonicity_certificate(p, n);
    EXPECT_TRUE(r.delay_nonincreasing);
    EXPECT_TRUE(r.delay_condition);
  }
}

TEST(Monotonicity, SignsAgreeWithFiniteDifferences) {
  ParamSampler s(24);
  for (int i = 0; i < 1000; ++i) {
    const auto p = s.general();
    const double upper = p.base.max_tenders();
    const double n = s.uniform(1.0, upper);
    const double h = oracle::finite_diff_step(n, 1);
    if (n - 2 * h < 1.0 || n + 2 * h > upper) continue;
    const auto r = monotonicity_certificate(p, n);
    EXPECT_EQ(r.delay_condition, r.delay_nonincreasing) << "instance " << i;
    for (const char* name : {"locomotive", "tender", "charging", "delay"}) {
      const double fd = oracle::finite_diff(
          [&](double x) { return total_cost_general(p, x).component(name); }, n, 1, 1.0, upper);
      const double analytic = std::string_view(name) == "locomotive" ? r.d_locomotive
                              : std::string_view(name) == "tender"   ? r.d_tender
                              : std::string_view(name) == "charging" ? r.d_charging
                                                                     : r.d_delay;
      // Signs only matter where the derivative is resolvable at this step.
      if (std::fabs(analytic) > 1e-6 * total_cost_general(p, n).component(name) / n) {
        EXPECT_EQ(fd > 0, analytic > 0) << name << " instance " << i;
      }
    }
  }
}

TEST(Convexity, DelayOnlyIsTwoEOverNCubed) {
  auto p = fixture_params("coal");
  p.loco_rate = p.tender_rate = p.stop_energy_cost = 0;
  const double samples[] = {5.0, 20.0};
  const auto r = convexity_certificate(p, samples);
  const double E = coefficients(p).E;
  for (const auto& s : r.samples) EXPECT_LE(rel_diff(s.total, 2 * E / (s.n * s.n * s.n)), 1e-14);
}

TEST(Convexity, RandomInstancesMatchFiniteDifferences) {
  ParamSampler s(25);
  for (int i = 0; i < 1000; ++i) {
    const auto p = s.general();
    const double upper = p.base.max_tenders();
    std::vector<double> samples = {1.0, upper, s.uniform(1.0, upper), s.uniform(1.0, upper)};
    const auto r = convexity_certificate(p, samples);
    for (const auto& x : r.samples) {
      EXPECT_GT(x.total, 0.0);
      EXPECT_GE(x.delay, 0.0);
    }
    EXPECT_LE(r.max_relative_error, 1e-4) << "instance " << i;
  }
}

TEST(Convexity, BoundaryAdjacentStress) {
  ParamSampler s(26);
  for (int i = 0; i < 200; ++i) {
    const auto p = s.general();
    const double upper = p.base.max_tenders();
    const double samples[] = {upper - 1e-9 * upper, upper};
    EXPECT_NO_THROW({
      const auto r = convexity_certificate(p, samples);
      for (const auto& x : r.samples) EXPECT_GT(x.total, 0.0);
    });
  }
}

TEST(Derivatives, GeneralMatchesFiniteDifferences) {
  ParamSampler s(27);
  for (int i = 0; i < 1000; ++i) {
    const auto p = s.general();
    const auto& b = p.base;
    const double upper = b.max_tenders();
    const double n = s.uniform(1.0, upper);
    const double h = oracle::finite_diff_step(n, 1);
    if (n - 2 * h < 1.0 || n + 2 * h > upper) continue;
    const auto c = coefficients(p);
    const double L = b.train_length;
    const double a = b.alpha;
    const double u = L - a * n;
    const double g = L * n - a * n * n;
    // Sum of the magnitudes of the regrouped terms' slopes.
    const double scale = c.A * L / (u * u) + c.B * std::fabs(L - 2 * a * n) / (g * g) +
                         c.C * a / (u * u) + c.E / (n * n);
    const double fd = oracle::finite_diff(
        [&](double x) { return total_cost_general(p, x).total_cost; }, n, 1, 1.0, upper);
    EXPECT_LE(std::fabs(fd - derivatives_general(p, n).first) / scale, 1e-5) << "instance " << i;
  }
}

TEST(CostShares, SumToHundredAndMatchComponents) {
  ParamSampler s(28);
  for (int i = 0; i < 200; ++i) {
    const auto p = s.general();
    const double n = s.uniform(1.0, p.base.max_tenders());
    const auto sh = cost_shares(p, n);
    EXPECT_NEAR(sh.locomotive + sh.battery + sh.charging + sh.delay, 100.0, 1e-9);
    const auto e = total_cost_general(p, n);
    const double variable = e.total_cost - e.component("constant");
    EXPECT_LE(rel_diff(sh.delay, 100 * e.component("delay") / variable), 1e-12);
  }
}

TEST(Validation, RejectsNegativeRates) {
  auto p = fixture_params("coal");
  p.loco_rate = -1;
  EXPECT_THROW(p.validate(), ValidationError);
  p = fixture_params("coal");
  p.locomotives = 0;
  EXPECT_THROW(p.validate(), ValidationError);
}

}  // namespace
}  // namespace tender
