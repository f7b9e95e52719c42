#pragma once

// Tender model with trip-time dependent fixed costs.  Per-train fixed cost
//
//   k(n) = (nl cl + n cn) t(n) + f n s(n)
//
// so locomotive and tender equipment are charged for every hour of the trip
// (including charging stops).  The annual total regroups into
//
//   TC(n) = A n/(L - a n) + B/(L n - a n^2) + C/(L - a n) + E/n + F
//
// which stays convex on 1 <= n <= (L - 1)/a.

#include <optional>
#include <span>
#include <vector>

#include "tender/core_model.hpp"

namespace tender {

struct GeneralModelParams {
  SimpleModelParams base;        // dispatch_cost and car_cost are not used
  int locomotives = 1;           // nl
  double loco_rate = 0.0;        // cl, USD per locomotive-hour (incl. labor)
  double tender_rate = 0.0;      // cn, USD per tender-hour
  double stop_energy_cost = 0.0; // f, USD per tender per stop

  void validate() const;
};

struct CoefficientSet {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double E = 0.0;
  double F = 0.0;
};

CoefficientSet coefficients(const GeneralModelParams& p);

// k(n), USD per train.
double fixed_cost(const GeneralModelParams& p, double n);

// Components "locomotive", "tender", "charging", "delay", "constant".
// Cross-checks the direct k(n) form against the A..F regrouping and throws
// ConsistencyError if they drift apart by more than 1e-10 relative.
ConfigurationEvaluation total_cost_general(const GeneralModelParams& p, double n);

// Regrouped total without domain checks; used by numeric searches that may
// probe just outside the feasible interval.
double total_cost_regrouped(const CoefficientSet& c, double train_length, double alpha,
                            double n) noexcept;

// Shares (percent) of the n-dependent part of the total, i.e. without the
// constant h t0 Q: locomotive and battery hours at the nominal trip time,
// charging energy, and everything spent while stopped (held cars plus idle
// equipment).  Sums to 100.
struct CostShares {
  double locomotive = 0.0;
  double battery = 0.0;
  double charging = 0.0;
  double delay = 0.0;
};

CostShares cost_shares(const GeneralModelParams& p, double n);

Derivatives derivatives_general(const GeneralModelParams& p, double n);

// Stationary point of the regrouped total.  Empty when the leading
// coefficient AL + Ca - Ea^2 is not safely positive or the radicand is
// negative.
std::optional<double> closed_form_candidate(const CoefficientSet& c, double train_length,
                                            double alpha);

struct GeneralOptimum {
  double n_continuous = 0.0;
  Bound bound = Bound::Interior;
  bool closed_form = false;  // false when bounded ternary search was used
  IntegerOptimum integer;
};

GeneralOptimum optimal_n_general(const GeneralModelParams& p,
                                 Granularity g = Granularity::per_train());

struct MonotonicityReport {
  double n = 0.0;
  double d_locomotive = 0.0;  // > 0 whenever cl t0 > 0
  double d_tender = 0.0;      // > 0 whenever cn t0 > 0
  double d_charging = 0.0;    // > 0 whenever f > 0
  double d_delay = 0.0;
  bool locomotive_increasing = false;
  bool tender_increasing = false;
  bool charging_increasing = false;
  // cn <= nl cl (L - 2an)/(a n^2) + h (L - an)^2/(a n^2); equivalent to
  // d_delay <= 0.
  bool delay_condition = false;
  // The pair as usually printed: cn <= nl cl (L - 2an)/(a n^2) + h (L - an)^2
  // and L - 2an <= 0.  Kept for reference; it is not a sufficient condition.
  bool delay_condition_printed = false;
  bool delay_nonincreasing = false;
};

MonotonicityReport monotonicity_certificate(const GeneralModelParams& p, double n);

struct ConvexitySample {
  double n = 0.0;
  double total = 0.0;  // TC''
  double locomotive = 0.0;
  double tender = 0.0;
  double charging = 0.0;
  double delay = 0.0;
  std::optional<double> numeric_total;  // central difference, if margin allows
  double relative_error = 0.0;
};

struct ConvexityReport {
  std::vector<ConvexitySample> samples;
  double max_relative_error = 0.0;
};

// Throws ModelViolation if any analytic second derivative is negative.
ConvexityReport convexity_certificate(const GeneralModelParams& p,
                                      std::span<const double> samples);

}  // namespace tender
