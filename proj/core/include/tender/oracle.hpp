#pragma once

// Brute-force and numeric reference routines.  Nothing in here may call the
// closed forms in core_model / general_model: these are the independent side
// of every cross-check in the test suite.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "tender/errors.hpp"

namespace tender::oracle {

struct GridSpec {
  double lower = 1.0;
  double upper = 1.0;
  double step = 1e-3;
};

struct GridResult {
  double n = 0.0;
  double cost = 0.0;
};

// Exhaustive evaluation at lower, lower + step, ..., and at `upper` itself
// when the stride does not land on it.  Ties keep the smallest n.
template <typename Cost>
GridResult grid_min(Cost&& cost, const GridSpec& grid) {
  if (!(grid.step > 0.0) || !(grid.upper >= grid.lower)) {
    throw ValidationError("grid needs step > 0 and upper >= lower");
  }
  GridResult best{grid.lower, cost(grid.lower)};
  const auto count = static_cast<std::size_t>(std::floor((grid.upper - grid.lower) / grid.step));
  for (std::size_t i = 1; i <= count; ++i) {
    const double n = grid.lower + static_cast<double>(i) * grid.step;
    if (n > grid.upper) break;
    const double c = cost(n);
    if (c < best.cost) best = {n, c};
  }
  const double last = grid.lower + static_cast<double>(count) * grid.step;
  if (last < grid.upper) {
    const double c = cost(grid.upper);
    if (c < best.cost) best = {grid.upper, c};
  }
  return best;
}

struct IntegerResult {
  int n = 0;
  double cost = 0.0;
};

// Every n = multiple * m (m = 1, 2, ...) with L - alpha n >= 1; cheapest
// wins, ties keep the smallest n.
template <typename Cost>
IntegerResult integer_scan(Cost&& cost, double train_length, double alpha, int multiple = 1) {
  if (multiple < 1) throw ValidationError("multiple must be >= 1");
  IntegerResult best{0, 0.0};
  for (long long m = 1;; ++m) {
    const long long n = m * multiple;
    if (!(train_length - alpha * static_cast<double>(n) >= 1.0)) break;
    const double c = cost(static_cast<int>(n));
    if (best.n == 0 || c < best.cost) best = {static_cast<int>(n), c};
  }
  if (best.n == 0) throw InfeasibleError("integer scan: empty feasible range");
  return best;
}

inline double finite_diff_step(double n, int order) {
  return (order == 1 ? 1e-6 : 1e-4) * std::fmax(1.0, std::fabs(n));
}

// Central differences.  [lower, upper] is where `cost` may be evaluated; the
// point needs a margin of two steps on both sides.  A zero step means
// finite_diff_step(n, order).
template <typename Cost>
double finite_diff(Cost&& cost, double n, int order, double lower, double upper, double step = 0.0) {
  if (order != 1 && order != 2) throw ValidationError("finite_diff order must be 1 or 2");
  if (!(step >= 0.0)) throw ValidationError("finite_diff step must be >= 0");
  const double h = step > 0.0 ? step : finite_diff_step(n, order);
  if (n - 2.0 * h < lower || n + 2.0 * h > upper) {
    throw DomainError("finite_diff: insufficient margin around n = " + std::to_string(n));
  }
  if (order == 1) return (cost(n + h) - cost(n - h)) / (2.0 * h);
  return (cost(n + h) - 2.0 * cost(n) + cost(n - h)) / (h * h);
}

// Ternary search for the minimum of a unimodal function on [lo, hi].
template <typename Cost>
double ternary_min(Cost&& cost, double lo, double hi, double tol = 1e-12) {
  for (int it = 0; it < 400 && hi - lo > tol * std::fmax(1.0, std::fabs(hi)); ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (cost(m1) <= cost(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return 0.5 * (lo + hi);
}

enum class StopCounting { Continuous, Ceiling };

struct TripResult {
  double hours = 0.0;
  double stops = 0.0;
};

// Trip time by walking the route.  Continuous counting charges fractional
// stops D / R; ceiling counting starts full, runs each leg until the range
// is spent and stops only if track remains.
TripResult trip_accumulate(double distance, double tender_range, double n, double nominal_time,
                           double stop_time, StopCounting mode);

}  // namespace tender::oracle
