#pragma once

// Random feasible model instances shared by the property tests.  Ranges
// cover short and long trains, light and heavy tenders, and cost rates
// several orders of magnitude apart.

#include <cmath>
#include <cstdint>
#include <random>

#include "tender/general_model.hpp"

namespace tender::testing {

class ParamSampler {
 public:
  explicit ParamSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<>(lo, hi)(rng_); }

  SimpleModelParams simple() {
    SimpleModelParams p;
    p.train_length = std::round(uniform(10.0, 150.0));
    p.alpha = uniform(0.2, (p.train_length - 1.0) / 2.0);
    p.distance = uniform(50.0, 3000.0);
    p.nominal_time = uniform(0.0, 150.0);
    p.demand = log_uniform(100.0, 1e5);
    p.tender_range = log_uniform(10.0, 800.0);
    p.holding_cost = log_uniform(0.1, 60.0);
    p.stop_time = log_uniform(0.05, 30.0);
    p.dispatch_cost = log_uniform(10.0, 1e5);
    return p;
  }

  GeneralModelParams general() {
    GeneralModelParams g;
    g.base = simple();
    g.base.dispatch_cost = 0.0;
    g.locomotives = integer(1, 6);
    g.loco_rate = log_uniform(1.0, 1000.0);
    g.tender_rate = log_uniform(1.0, 500.0);
    g.stop_energy_cost = log_uniform(10.0, 10000.0);
    return g;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b) {
  const double scale = std::fmax(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

}  // namespace tender::testing
