#include "tender/general_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tender/errors.hpp"
#include "tender/oracle.hpp"

namespace tender {

namespace {

constexpr double kIdentityTolerance = 1e-10;

void require_rate(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError(std::string(name) + " must be finite and >= 0");
  }
}

double relative_gap(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale;
}

// Golden-section search on a convex function over [lo, hi].
template <typename F>
double bounded_minimize(F&& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 300 && b - a > 1e-13 * std::max(1.0, b); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return std::clamp(0.5 * (a + b), lo, hi);
}

}  // namespace

void GeneralModelParams::validate() const {
  base.validate();
  if (locomotives < 1) throw ValidationError("locomotives must be >= 1");
  require_rate(loco_rate, "loco_rate");
  require_rate(tender_rate, "tender_rate");
  require_rate(stop_energy_cost, "stop_energy_cost");
}

CoefficientSet coefficients(const GeneralModelParams& p) {
  const auto& b = p.base;
  const double stops = b.stop_ratio();  // D / r
  const double Q = b.demand;
  const double nl_cl = p.locomotives * p.loco_rate;
  return {
      p.tender_rate * b.nominal_time * Q,
      nl_cl * stops * b.stop_time * Q,
      (nl_cl * b.nominal_time + p.tender_rate * stops * b.stop_time +
       p.stop_energy_cost * stops) *
          Q,
      b.holding_cost * stops * b.stop_time * Q,
      b.holding_cost * b.nominal_time * Q,
  };
}

double fixed_cost(const GeneralModelParams& p, double n) {
  const double t = trip_time(p.base, n);
  const double stops = p.base.distance / (p.base.tender_range * n);
  return (p.locomotives * p.loco_rate + n * p.tender_rate) * t +
         p.stop_energy_cost * n * stops;
}

double total_cost_regrouped(const CoefficientSet& c, double L, double alpha,
                            double n) noexcept {
  const double payload = L - alpha * n;
  return c.A * n / payload + c.B / (L * n - alpha * n * n) + c.C / payload + c.E / n + c.F;
}

ConfigurationEvaluation total_cost_general(const GeneralModelParams& p, double n) {
  check_tender_count(p.base, n);
  const auto& b = p.base;
  const double Q = b.demand;
  const double L = b.train_length;

  ConfigurationEvaluation ev;
  ev.n = n;
  ev.payload = L - b.alpha * n;
  ev.range = b.tender_range * n;
  ev.stops_continuous = b.distance / ev.range;
  ev.stops_practical = practical_stops(b.distance, ev.range);
  ev.trip_time = b.nominal_time + ev.stops_continuous * b.stop_time;

  const double stop_delay = b.stop_ratio() * b.stop_time * Q;  // (D/r) ts Q
  const double loco = p.locomotives * p.loco_rate * b.nominal_time * Q / ev.payload;
  const double tender = p.tender_rate * b.nominal_time * Q * n / ev.payload;
  const double charging = p.stop_energy_cost * b.stop_ratio() * Q / ev.payload;
  const double delay = (p.locomotives * p.loco_rate / (L * n - b.alpha * n * n) +
                        p.tender_rate / ev.payload + b.holding_cost / n) *
                       stop_delay;
  const double constant = b.holding_cost * b.nominal_time * Q;

  ev.components = {{"locomotive", loco},
                   {"tender", tender},
                   {"charging", charging},
                   {"delay", delay},
                   {"constant", constant}};
  ev.total_cost = loco + tender + charging + delay + constant;

  const double direct = fixed_cost(p, n) * Q / ev.payload + b.holding_cost * ev.trip_time * Q;
  const double regrouped = total_cost_regrouped(coefficients(p), L, b.alpha, n);
  if (relative_gap(direct, regrouped) > kIdentityTolerance ||
      relative_gap(direct, ev.total_cost) > kIdentityTolerance) {
    throw ConsistencyError("cost forms disagree at n = " + std::to_string(n) +
                           ": direct " + std::to_string(direct) + ", regrouped " +
                           std::to_string(regrouped) + ", components " +
                           std::to_string(ev.total_cost));
  }
  return ev;
}

CostShares cost_shares(const GeneralModelParams& p, double n) {
  const auto ev = total_cost_general(p, n);
  const double loco = ev.component("locomotive");
  const double tender = ev.component("tender");
  const double charging = ev.component("charging");
  const double delay = ev.component("delay");
  const double total = loco + tender + charging + delay;
  if (!(total > 0.0)) return {};
  return {100.0 * loco / total, 100.0 * tender / total, 100.0 * charging / total,
          100.0 * delay / total};
}

Derivatives derivatives_general(const GeneralModelParams& p, double n) {
  check_tender_count(p.base, n);
  const auto c = coefficients(p);
  const double L = p.base.train_length;
  const double a = p.base.alpha;
  const double u = L - a * n;
  const double g = L * n - a * n * n;
  const double first = c.A * L / (u * u) + c.B * (2.0 * a * n - L) / (g * g) +
                       c.C * a / (u * u) - c.E / (n * n);
  const double shifted = a * n - L / 2.0;
  const double second = c.A * 2.0 * a * L / (u * u * u) +
                        c.B * 2.0 * (3.0 * shifted * shifted + L * L / 4.0) / (n * n * n * u * u * u) +
                        c.C * 2.0 * a * a / (u * u * u) + c.E * 2.0 / (n * n * n);
  return {first, second};
}

std::optional<double> closed_form_candidate(const CoefficientSet& c, double L, double alpha) {
  const double den = c.A * L + c.C * alpha - c.E * alpha * alpha;
  const double scale = c.A * L + c.C * alpha + c.E * alpha * alpha;
  if (!(den > 1e-12 * scale)) return std::nullopt;
  const double be = c.B + c.E * L;
  const double radicand = be * (c.A * L * L + c.B * alpha * alpha + c.C * L * alpha);
  if (!(radicand >= 0.0)) return std::nullopt;
  // (-a(B + EL) + sqrt(rad)) / den, multiplied through by the conjugate:
  // rad - a^2 (B + EL)^2 = (B + EL) L den, so the leading coefficient
  // cancels and no digits are lost to the subtraction.
  const double n = be * L / (std::sqrt(radicand) + alpha * be);
  if (!std::isfinite(n) || !(n > 0.0)) return std::nullopt;
  return n;
}

GeneralOptimum optimal_n_general(const GeneralModelParams& p, Granularity g) {
  p.validate();
  const auto& b = p.base;
  const int max_units = max_feasible_multiple(b.train_length, b.alpha, g.multiple);
  if (max_units == 0) {
    throw InfeasibleError("no feasible tender count that is a multiple of " +
                          std::to_string(g.multiple));
  }

  const auto c = coefficients(p);
  const double lower = 1.0;
  const double upper = b.max_tenders();
  auto cost = [&](double n) { return total_cost_regrouped(c, b.train_length, b.alpha, n); };

  GeneralOptimum out;
  const auto candidate = closed_form_candidate(c, b.train_length, b.alpha);
  if (candidate && *candidate >= lower && *candidate <= upper) {
    out.n_continuous = *candidate;
    out.closed_form = true;
#ifndef NDEBUG
    const double searched = bounded_minimize(cost, lower, upper);
    if (cost(out.n_continuous) > cost(searched) * (1.0 + 1e-12)) {
      throw ConsistencyError("closed-form optimum " + std::to_string(out.n_continuous) +
                             " is beaten by bounded search at " + std::to_string(searched));
    }
#endif
  } else {
    out.closed_form = false;
    if (derivatives_general(p, lower).first >= 0.0) {
      out.n_continuous = lower;
      out.bound = Bound::Lower;
    } else if (derivatives_general(p, upper).first <= 0.0) {
      out.n_continuous = upper;
      out.bound = Bound::Upper;
    } else {
      out.n_continuous = bounded_minimize(cost, lower, upper);
    }
  }

  const int best = pick_adjacent(out.n_continuous / g.multiple, max_units, [&](int m) {
    return total_cost_general(p, static_cast<double>(m) * g.multiple).total_cost;
  });
  out.integer.per_unit = best;
  out.integer.multiple = g.multiple;
  out.integer.n = best * g.multiple;
  out.integer.evaluation = total_cost_general(p, out.integer.n);
  return out;
}

MonotonicityReport monotonicity_certificate(const GeneralModelParams& p, double n) {
  check_tender_count(p.base, n);
  const auto& b = p.base;
  const double Q = b.demand;
  const double L = b.train_length;
  const double a = b.alpha;
  const double u = L - a * n;
  const double g = L * n - a * n * n;
  const double nl_cl = p.locomotives * p.loco_rate;
  const double stop_delay = b.stop_ratio() * b.stop_time * Q;

  MonotonicityReport r;
  r.n = n;
  r.d_locomotive = nl_cl * b.nominal_time * Q * a / (u * u);
  r.d_tender = p.tender_rate * b.nominal_time * Q * L / (u * u);
  r.d_charging = p.stop_energy_cost * b.stop_ratio() * Q * a / (u * u);
  r.d_delay = (nl_cl * (2.0 * a * n - L) / (g * g) + p.tender_rate * a / (u * u) -
               b.holding_cost / (n * n)) *
              stop_delay;
  r.locomotive_increasing = r.d_locomotive > 0.0;
  r.tender_increasing = r.d_tender > 0.0;
  r.charging_increasing = r.d_charging > 0.0;

  const double loco_term = nl_cl * (L - 2.0 * a * n) / (a * n * n);
  r.delay_condition = p.tender_rate <= loco_term + b.holding_cost * u * u / (a * n * n);
  r.delay_condition_printed =
      p.tender_rate <= loco_term + b.holding_cost * u * u && L - 2.0 * a * n <= 0.0;
  r.delay_nonincreasing = r.d_delay <= 0.0;
  return r;
}

ConvexityReport convexity_certificate(const GeneralModelParams& p,
                                      std::span<const double> samples) {
  p.validate();
  const auto& b = p.base;
  const auto c = coefficients(p);
  const double Q = b.demand;
  const double L = b.train_length;
  const double a = b.alpha;
  const double nl_cl = p.locomotives * p.loco_rate;
  const double stop_delay = b.stop_ratio() * b.stop_time * Q;

  ConvexityReport report;
  report.samples.reserve(samples.size());
  for (const double n : samples) {
    check_tender_count(b, n);
    const double u = L - a * n;
    const double g = L * n - a * n * n;
    ConvexitySample s;
    s.n = n;
    s.locomotive = nl_cl * b.nominal_time * Q * 2.0 * a * a / (u * u * u);
    s.tender = p.tender_rate * b.nominal_time * Q * 2.0 * a * L / (u * u * u);
    s.charging = p.stop_energy_cost * b.stop_ratio() * Q * 2.0 * a * a / (u * u * u);
    s.delay = 2.0 *
              (nl_cl * (3.0 * a * a * n * n - 3.0 * L * a * n + L * L) / (g * g * g) +
               p.tender_rate * a * a / (u * u * u) + b.holding_cost / (n * n * n)) *
              stop_delay;
    s.total = derivatives_general(p, n).second;

    if (s.total < 0.0 || s.locomotive < 0.0 || s.tender < 0.0 || s.charging < 0.0 ||
        s.delay < 0.0) {
      throw ModelViolation("negative second derivative at n = " + std::to_string(n));
    }

    // The regrouped form is defined on (0, L / alpha), wider than the
    // feasible interval, so boundary samples still get a central difference.
    // The step shrinks with the distance to the nearer pole; next to the
    // upper bound that distance is 1 / alpha.
    auto cost = [&](double x) { return total_cost_regrouped(c, L, a, x); };
    const double h = 1e-4 * std::min(n, u / a);
    if (n - 2.0 * h > 0.0 && n + 2.0 * h < L / a) {
      s.numeric_total = oracle::finite_diff(cost, n, 2, 0.0, L / a, h);
      s.relative_error = relative_gap(*s.numeric_total, s.total);
      report.max_relative_error = std::max(report.max_relative_error, s.relative_error);
    }
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace tender
