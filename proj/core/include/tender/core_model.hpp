#pragma once

// Constant-fixed-cost tender model.  Annual cost of shipping Q cars with n
// energy tender cars per train:
//
//   TC(n) = k Q / (L - a n) + h t(n) Q + p Q,   t(n) = t0 + D / (r n) * ts
//
// TC is strictly convex on the feasible interval 1 <= n <= (L - 1) / a, so the
// stationary point (clamped to the interval) is the continuous optimum and
// the integer optimum is one of the two neighbouring integers.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace tender {

struct SimpleModelParams {
  double distance = 0.0;       // D, miles
  double nominal_time = 0.0;   // t0, hours
  double train_length = 0.0;   // L, cars
  double demand = 0.0;         // Q, cars per year
  double tender_range = 0.0;   // r, miles per tender car
  double alpha = 0.0;          // tender weight / loaded railcar weight
  double holding_cost = 0.0;   // h, USD per car-hour
  double stop_time = 0.0;      // ts, hours per stop
  double dispatch_cost = 0.0;  // k, USD per train
  double car_cost = 0.0;       // p, USD per car

  // Throws ValidationError on non-finite or out-of-range fields and
  // InfeasibleError when not even one tender car fits.
  void validate() const;

  double max_tenders() const noexcept { return (train_length - 1.0) / alpha; }
  double stop_ratio() const noexcept { return distance / tender_range; }
};

enum class Bound { Interior, Lower, Upper };

std::string_view to_string(Bound b) noexcept;

struct CostComponent {
  std::string name;
  double value = 0.0;
};

struct ConfigurationEvaluation {
  double n = 0.0;
  double payload = 0.0;
  double stops_continuous = 0.0;
  int stops_practical = 0;
  double range = 0.0;
  double trip_time = 0.0;
  std::vector<CostComponent> components;
  double total_cost = 0.0;  // sum of components

  // Throws std::out_of_range for an unknown component name.
  double component(std::string_view name) const;
};

// Stops needed when tenders start full: ceil(D / R) - 1, never negative.
int practical_stops(double distance, double range);

// Throws DomainError for n < 1 and InfeasibleError when payload L - a n < 1.
void check_tender_count(const SimpleModelParams& p, double n);

double trip_time(const SimpleModelParams& p, double n);

// Components: order = k Q / payload, delay = h t(n) Q, purchase = p Q.
ConfigurationEvaluation total_cost_simple(const SimpleModelParams& p, double n);

struct ContinuousOptimum {
  double n = 0.0;
  Bound bound = Bound::Interior;
};

ContinuousOptimum optimal_n_continuous(const SimpleModelParams& p);

double optimal_range(const SimpleModelParams& p);

// Closed-form minimum for interior optima; falls back to evaluating the
// cost at the clamped bound otherwise.
double min_total_cost(const SimpleModelParams& p);

// Tender counts are either free integers or whole multiples of the number of
// locomotives (the same number of tenders behind every locomotive).
struct Granularity {
  int multiple = 1;

  static Granularity per_train() { return {1}; }
  static Granularity per_locomotive(int locomotives);
};

struct IntegerOptimum {
  int n = 0;         // tender cars per train
  int per_unit = 0;  // n / multiple (tenders per locomotive in that mode)
  int multiple = 1;
  ConfigurationEvaluation evaluation;
};

// Largest m with L - a (multiple m) >= 1; zero when nothing fits.
int max_feasible_multiple(double train_length, double alpha, int multiple);

// Adjacent-integer rule on multiples: compares floor and ceil of
// `continuous_units` clamped to [1, max_units] and keeps the cheaper one
// (ties go to the smaller count).
template <typename CostOfUnits>
int pick_adjacent(double continuous_units, int max_units, CostOfUnits&& cost) {
  auto clamp = [max_units](double v) {
    if (v < 1.0) return 1;
    if (v > static_cast<double>(max_units)) return max_units;
    return static_cast<int>(v);
  };
  const int lo = clamp(std::floor(continuous_units));
  const int hi = clamp(std::ceil(continuous_units));
  if (lo == hi) return lo;
  return cost(hi) < cost(lo) ? hi : lo;
}

IntegerOptimum optimal_n_integer(const SimpleModelParams& p,
                                 Granularity g = Granularity::per_train());

struct Derivatives {
  double first = 0.0;
  double second = 0.0;
};

Derivatives derivatives_simple(const SimpleModelParams& p, double n);

}  // namespace tender
