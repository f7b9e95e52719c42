#include "tender/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tender/errors.hpp"

namespace tender {

namespace {

// Continuous tender counts produced by closed forms land on the bounds up
// to rounding; this much payload shortfall is accepted as "on the bound".
constexpr double kPayloadSlack = 1e-9;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw ValidationError(std::string(name) + " must be finite");
  }
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be > 0");
}

void require_nonnegative(double v, const char* name) {
  require_finite(v, name);
  if (v < 0.0) throw ValidationError(std::string(name) + " must be >= 0");
}

}  // namespace

void SimpleModelParams::validate() const {
  require_positive(distance, "distance");
  require_nonnegative(nominal_time, "nominal_time");
  require_positive(train_length, "train_length");
  require_positive(demand, "demand");
  require_positive(tender_range, "tender_range");
  require_positive(alpha, "alpha");
  require_nonnegative(holding_cost, "holding_cost");
  require_nonnegative(stop_time, "stop_time");
  require_nonnegative(dispatch_cost, "dispatch_cost");
  require_finite(car_cost, "car_cost");
  if (train_length < 2.0) {
    throw ValidationError("train_length must be >= 2 (one tender, one revenue car)");
  }
  if (train_length - alpha < 1.0) {
    throw InfeasibleError("train too short: L - alpha = " +
                          std::to_string(train_length - alpha) +
                          " < 1 leaves no room for a single tender car");
  }
}

std::string_view to_string(Bound b) noexcept {
  switch (b) {
    case Bound::Interior: return "interior";
    case Bound::Lower: return "lower";
    case Bound::Upper: return "upper";
  }
  return "unknown";
}

double ConfigurationEvaluation::component(std::string_view name) const {
  for (const auto& c : components) {
    if (c.name == name) return c.value;
  }
  throw std::out_of_range("no cost component named " + std::string(name));
}

int practical_stops(double distance, double range) {
  const double legs = std::ceil(distance / range);
  return legs <= 1.0 ? 0 : static_cast<int>(legs) - 1;
}

void check_tender_count(const SimpleModelParams& p, double n) {
  if (!std::isfinite(n)) throw DomainError("tender count must be finite");
  if (n < 1.0 - 1e-12) {
    throw DomainError("tender count " + std::to_string(n) +
                      " violates lower bound n >= 1");
  }
  const double payload = p.train_length - p.alpha * n;
  if (payload < 1.0 - kPayloadSlack) {
    throw InfeasibleError("tender count " + std::to_string(n) +
                          " violates upper bound n <= (L - 1) / alpha = " +
                          std::to_string(p.max_tenders()) +
                          " (payload " + std::to_string(payload) + " < 1)");
  }
}

double trip_time(const SimpleModelParams& p, double n) {
  check_tender_count(p, n);
  return p.nominal_time + p.distance / (p.tender_range * n) * p.stop_time;
}

ConfigurationEvaluation total_cost_simple(const SimpleModelParams& p, double n) {
  check_tender_count(p, n);
  ConfigurationEvaluation ev;
  ev.n = n;
  ev.payload = p.train_length - p.alpha * n;
  ev.range = p.tender_range * n;
  ev.stops_continuous = p.distance / ev.range;
  ev.stops_practical = practical_stops(p.distance, ev.range);
  ev.trip_time = p.nominal_time + ev.stops_continuous * p.stop_time;

  const double order = p.dispatch_cost * p.demand / ev.payload;
  const double delay = p.holding_cost * ev.trip_time * p.demand;
  const double purchase = p.car_cost * p.demand;
  ev.components = {{"order", order}, {"delay", delay}, {"purchase", purchase}};
  ev.total_cost = order + delay + purchase;
  return ev;
}

ContinuousOptimum optimal_n_continuous(const SimpleModelParams& p) {
  p.validate();
  const double upper = p.max_tenders();
  const double delay_weight = p.holding_cost * p.stop_time * p.distance;
  // Without a stop-delay term the cost only grows with n.
  if (!(delay_weight > 0.0)) return {1.0, Bound::Lower};
  // Without dispatch cost only the (decreasing) delay term is left.
  if (!(p.dispatch_cost > 0.0)) return {upper, Bound::Upper};

  const double n = p.train_length /
                   (p.alpha + std::sqrt(p.dispatch_cost * p.alpha * p.tender_range /
                                        delay_weight));
  if (n <= 1.0) return {1.0, Bound::Lower};
  if (n >= upper) return {upper, Bound::Upper};
  return {n, Bound::Interior};
}

double optimal_range(const SimpleModelParams& p) {
  return p.tender_range * optimal_n_continuous(p).n;
}

double min_total_cost(const SimpleModelParams& p) {
  const auto opt = optimal_n_continuous(p);
  if (opt.bound != Bound::Interior) return total_cost_simple(p, opt.n).total_cost;

  const double stop_delay = p.alpha * p.holding_cost * p.stop_ratio() * p.stop_time;
  return p.demand / p.train_length *
             (p.dispatch_cost + stop_delay + 2.0 * std::sqrt(p.dispatch_cost * stop_delay)) +
         p.holding_cost * p.nominal_time * p.demand + p.car_cost * p.demand;
}

Granularity Granularity::per_locomotive(int locomotives) {
  if (locomotives < 1) throw ValidationError("locomotives per train must be >= 1");
  return {locomotives};
}

int max_feasible_multiple(double train_length, double alpha, int multiple) {
  if (multiple < 1) throw ValidationError("tender multiple must be >= 1");
  auto fits = [&](long long m) {
    return train_length - alpha * static_cast<double>(m * multiple) >= 1.0;
  };
  if (!fits(1)) return 0;
  const double guess = std::floor((train_length - 1.0) / (alpha * multiple));
  const double cap = static_cast<double>(std::numeric_limits<int>::max() - 1);
  long long m = static_cast<long long>(std::clamp(guess, 1.0, cap));
  while (m < static_cast<long long>(cap) && fits(m + 1)) ++m;
  while (m > 1 && !fits(m)) --m;
  return static_cast<int>(m);
}

IntegerOptimum optimal_n_integer(const SimpleModelParams& p, Granularity g) {
  p.validate();
  const int max_units = max_feasible_multiple(p.train_length, p.alpha, g.multiple);
  if (max_units == 0) {
    throw InfeasibleError("no feasible tender count that is a multiple of " +
                          std::to_string(g.multiple));
  }
  const double units = optimal_n_continuous(p).n / g.multiple;
  const int best = pick_adjacent(units, max_units, [&](int m) {
    return total_cost_simple(p, static_cast<double>(m) * g.multiple).total_cost;
  });

  IntegerOptimum out;
  out.per_unit = best;
  out.multiple = g.multiple;
  out.n = best * g.multiple;
  out.evaluation = total_cost_simple(p, out.n);
  return out;
}

Derivatives derivatives_simple(const SimpleModelParams& p, double n) {
  check_tender_count(p, n);
  const double payload = p.train_length - p.alpha * n;
  const double order = p.dispatch_cost * p.demand;
  const double delay = p.holding_cost * p.stop_ratio() * p.stop_time * p.demand;
  return {order * p.alpha / (payload * payload) - delay / (n * n),
          2.0 * order * p.alpha * p.alpha / (payload * payload * payload) +
              2.0 * delay / (n * n * n)};
}

}  // namespace tender
