#pragma once

// Joint simulation of temperature, precipitation and snow depth, used to
// produce synthetic station series for testing and demonstrations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "snowcast/dataset.hpp"
#include "snowcast/random.hpp"
#include "snowcast/short_term.hpp"
#include "snowcast/weather.hpp"

namespace snowcast {

struct SyntheticClimate {
  TempParams temp;
  PrecipParams precip;
  ShortTermParams snow;
};

/// A coastal south-Norwegian climate: mid-January mean near -4 C, July near
/// +16 C, wet on roughly 45% of days, with the Oslo snow parameters.
inline SyntheticClimate oslo_like_climate() {
  SyntheticClimate c;
  const double w = 2.0 * std::numbers::pi / kSeasonPeriod * 15.0;  // coldest around Jan 15
  c.temp.trend = FourierTrend{6.0, {-10.0 * std::sin(w)}, {-10.0 * std::cos(w)}};
  c.temp.ar = {0.75};
  c.temp.innovation_sd = 2.2;

  c.precip.amount_trend = FourierTrend{std::log(4.0), {0.0}, {-0.2}};
  c.precip.amount_occ_lags = {0.1};
  c.precip.amount_cv_shape = 0.8;
  c.precip.zero_trend = FourierTrend{0.6, {0.0}, {0.1}};
  c.precip.zero_occ_lags = {-0.9};
  c.precip.temp_center = 0.0;
  c.precip.temp_scale = 1.0;

  c.snow = kOsloShortTerm;
  return c;
}

/**
 * Simulate `days` consecutive days starting at `start`. Depths are rounded
 * to `depth_resolution` cm when positive (0 keeps full precision); the
 * rounded value feeds the next day, as a recorded series would.
 */
inline Dataset simulate_dataset(const SyntheticClimate& c, const Date& start, int days, std::uint64_t seed,
                                double depth_resolution = 0.0, std::string label = "synthetic") {
  RandomStream rng(seed);
  LagHistory dev(c.temp.ar.size());
  LagHistory occ(static_cast<std::size_t>(c.precip.max_occ_lag()));
  double depth = 0.0;
  std::vector<DailyRecord> records;
  records.reserve(days);
  for (int i = 0; i < days; ++i) {
    const Date date = add_days(start, i);
    const SeasonDay s = season_day(date);
    const double temp = temp_step(c.temp, s, dev, rng);
    const double precip = precip_simulate(c.precip, s, occ, temp, rng).precip;
    depth = zig_sample(transition_spec(c.snow, {temp, precip, depth}), rng);
    if (depth_resolution > 0.0) depth = std::round(depth / depth_resolution) * depth_resolution;
    records.push_back({date, temp, precip, depth});
  }
  return Dataset(std::move(records), std::move(label));
}

}  // namespace snowcast
