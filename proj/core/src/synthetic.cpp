#include "tender/synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <random>

namespace tender {

namespace {

// Ranges are clipped to [lo, hi]; "median" is the lognormal median.
struct Profile {
  Commodity commodity;
  double weight;  // share of markets
  int loco_min, loco_max;
  double cars_per_loco_lo, cars_per_loco_hi;
  double alpha_mean, alpha_sd;
  double distance_median, distance_sigma, distance_lo, distance_hi;
  double speed_mean, speed_sd;
  double gross_mean, gross_sd;
};

// Weight ratios and tonnage follow the three linehaul examples: light,
// fast intermodal and automotive trains against heavy, slow bulk trains.
constexpr std::array<Profile, 9> kProfiles = {{
    {Commodity::AgriculturalFoods, 0.11, 2, 4, 24, 32, 1.25, 0.08, 900, 0.5, 200, 2200, 22, 2.5, 2300, 250},
    {Commodity::ChemicalPetroleum, 0.12, 2, 4, 24, 32, 1.25, 0.08, 800, 0.5, 200, 2200, 22, 2.5, 2300, 250},
    {Commodity::Coal, 0.12, 3, 6, 13.5, 16, 1.3, 0.06, 900, 0.45, 250, 1800, 20, 2.0, 2540, 180},
    {Commodity::ForestProducts, 0.05, 2, 4, 24, 32, 1.35, 0.08, 1000, 0.5, 200, 2400, 22, 2.5, 2500, 250},
    {Commodity::Intermodal, 0.24, 1, 3, 108, 128, 10.4, 0.6, 1500, 0.4, 400, 2800, 32, 2.5, 1600, 120},
    {Commodity::MetalsOres, 0.08, 2, 4, 24, 32, 1.25, 0.08, 800, 0.5, 200, 2200, 22, 2.5, 2300, 250},
    {Commodity::MotorVehicles, 0.06, 1, 2, 108, 128, 10.4, 0.6, 1500, 0.4, 400, 2800, 22, 2.0, 1600, 120},
    {Commodity::NonmetallicProducts, 0.08, 2, 4, 24, 32, 1.2, 0.08, 600, 0.5, 150, 1800, 22, 2.5, 2400, 250},
    {Commodity::Others, 0.14, 1, 3, 40, 60, 3.0, 0.3, 1000, 0.5, 200, 2600, 25, 2.5, 1800, 200},
}};

constexpr std::array<const char*, 4> kWestern = {"BNSF", "UP", "BNSF", "UP"};
constexpr std::array<const char*, 4> kEastern = {"CSX", "NS", "CSX", "NS"};

class Source {
 public:
  explicit Source(std::uint64_t seed) : engine_(seed) {}

  // 53 random bits in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
  }
  // Box-Muller, one value per call.
  double normal(double mean, double sd) {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  double lognormal(double median, double sigma) {
    return median * std::exp(normal(0.0, sigma));
  }

 private:
  std::mt19937_64 engine_;
};

double clip(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

double round_to(double v, double unit) { return std::round(v / unit) * unit; }

const Profile& pick_profile(Source& src) {
  double total = 0.0;
  for (const auto& p : kProfiles) total += p.weight;
  double u = src.uniform() * total;
  for (const auto& p : kProfiles) {
    if (u < p.weight) return p;
    u -= p.weight;
  }
  return kProfiles.back();
}

}  // namespace

std::vector<MarketRecord> generate_markets(const SyntheticOptions& options) {
  Source src(options.seed);
  std::vector<MarketRecord> out;
  out.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    const auto& p = pick_profile(src);
    MarketRecord r;
    char id[24];
    std::snprintf(id, sizeof id, "M%06zu", i + 1);
    r.market_id = id;
    r.commodity = p.commodity;
    r.region = src.uniform() < 0.55 ? Region::Western : Region::Eastern;
    const auto& pool = r.region == Region::Western ? kWestern : kEastern;
    r.railroad = pool[static_cast<std::size_t>(src.integer(0, 3))];
    r.locomotives = src.integer(p.loco_min, p.loco_max);
    const double cars = src.uniform(p.cars_per_loco_lo, p.cars_per_loco_hi);
    r.train_length = std::round(cars * r.locomotives);
    r.alpha = round_to(clip(src.normal(p.alpha_mean, p.alpha_sd), 0.5 * p.alpha_mean,
                            1.5 * p.alpha_mean), 0.01);
    r.distance = std::round(clip(src.lognormal(p.distance_median, p.distance_sigma),
                                 p.distance_lo, p.distance_hi));
    r.speed = round_to(clip(src.normal(p.speed_mean, p.speed_sd), 10.0, 50.0), 0.1);
    r.gross_tons = std::round(clip(src.normal(p.gross_mean, p.gross_sd), 0.6 * p.gross_mean,
                                   1.4 * p.gross_mean));
    r.annual_demand = std::round(clip(src.lognormal(3000.0, 0.8), 100.0, 100000.0));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tender
