#include "tender/oracle.hpp"

namespace tender::oracle {

TripResult trip_accumulate(double distance, double tender_range, double n, double nominal_time,
                           double stop_time, StopCounting mode) {
  if (!(distance > 0.0) || !(tender_range > 0.0) || !(n > 0.0)) {
    throw ValidationError("trip_accumulate needs positive distance, range and tender count");
  }
  const double range = tender_range * n;

  if (mode == StopCounting::Continuous) {
    // Whole legs plus the fractional remainder, one leg at a time.
    double stops = 0.0;
    double remaining = distance;
    while (remaining > range) {
      remaining -= range;
      stops += 1.0;
    }
    stops += remaining / range;
    return {nominal_time + stops * stop_time, stops};
  }

  const double eps = 1e-9 * distance;
  double remaining = distance;
  double hours = nominal_time;
  double stops = 0.0;
  for (;;) {
    remaining -= std::fmin(range, remaining);
    if (remaining <= eps) break;
    hours += stop_time;
    stops += 1.0;
  }
  return {hours, stops};
}

}  // namespace tender::oracle
