#pragma once

/** @file
 * Snow depth modelled directly as a time series (no weather inputs).
 *
 * Zero-inflated gamma as in the short-term model, but the positive-part
 * mean is log-linked to a seasonal trend, lagged snow/no-snow indicators
 * and lagged depths. Variance and bare-ground probability reuse the
 * short-term forms with yesterday's depth as the reference level.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "snowcast/dataset.hpp"
#include "snowcast/fourier.hpp"
#include "snowcast/random.hpp"
#include "snowcast/zig.hpp"

namespace snowcast {

struct DirectParams {
  FourierTrend trend;
  std::vector<double> occ_lags;    ///< on snow-present indicators, lag 1 first
  std::vector<double> depth_lags;  ///< on depths in cm, lag 1 first
  double zero_intercept = 3.0;
  double zero_slope = -1.0;
  double sigma1_sq = 1.0;
  double sigma2_sq = 1.0;
  /// Depth covariates and the positive-part mean are clamped to this level,
  /// the deepest snow seen when fitting, so simulated paths cannot feed back
  /// into an exploding mean once they leave the observed range.
  double depth_cap = std::numeric_limits<double>::infinity();

  int max_lag() const { return static_cast<int>(std::max(occ_lags.size(), depth_lags.size())); }

  int free_parameters() const {
    return trend.free_parameters() + static_cast<int>(occ_lags.size()) +
           static_cast<int>(depth_lags.size()) + 4;
  }

  void validate() const {
    trend.validate();
    if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0))
      throw std::invalid_argument("DirectParams: variance coefficients must be positive");
    if (!(depth_cap > 0.0)) throw std::invalid_argument("DirectParams: depth_cap must be positive");
  }
};

/// Bound on |log| of the positive-part mean (about 1e100 cm). The ceiling is far
/// above any physical depth but keeps the variance finite; the floor keeps the
/// mean strictly positive.
inline constexpr double kMaxDirectLogMean = 230.0;

inline double direct_mean_from_log(double eta, double cap) {
  return std::min(std::exp(std::clamp(eta, -kMaxDirectLogMean, kMaxDirectLogMean)), cap);
}

/// sum_j coef[j] * min(depths[j], cap), depths lag-first.
inline double capped_depth_dot(std::span<const double> coef, std::span<const double> depths, double cap) {
  double s = 0.0;
  for (std::size_t j = 0; j < coef.size(); ++j) s += coef[j] * std::min(depths[j], cap);
  return s;
}

inline double direct_log_mean(const DirectParams& p, SeasonDay s, std::span<const double> occ_history,
                              std::span<const double> depth_history) {
  return fourier_eval(p.trend, s) + lag_dot(p.occ_lags, occ_history) +
         capped_depth_dot(p.depth_lags, depth_history, p.depth_cap);
}

/// Positive-part mean. Histories are lag-first.
inline double direct_mean(const DirectParams& p, SeasonDay s, std::span<const double> occ_history,
                          std::span<const double> depth_history) {
  if (occ_history.size() < p.occ_lags.size() || depth_history.size() < p.depth_lags.size())
    throw std::domain_error("direct_mean: insufficient history");
  return direct_mean_from_log(direct_log_mean(p, s, occ_history, depth_history), p.depth_cap);
}

/// Reference depth for the variance: lag 1 when the model has depth lags, else 0.
inline double direct_reference_depth(const DirectParams& p, std::span<const double> depth_history) {
  return p.depth_lags.empty() || depth_history.empty() ? 0.0 : depth_history[0];
}

inline ZeroInflatedSpec direct_spec_from_mean(const DirectParams& p, double mean, double reference) {
  const double change = mean - reference;
  const double variance = p.sigma1_sq + p.sigma2_sq * change * change;
  return ZeroInflatedSpec{inverse_logit(p.zero_intercept + p.zero_slope * mean),
                          gamma_from_moments(std::max(mean, 1e-12), variance)};
}

inline ZeroInflatedSpec direct_transition_spec(const DirectParams& p, SeasonDay s,
                                               std::span<const double> occ_history,
                                               std::span<const double> depth_history) {
  const double mean = direct_mean(p, s, occ_history, depth_history);
  return direct_spec_from_mean(p, mean, direct_reference_depth(p, depth_history));
}

/// Precomputed transitions; lag vectors stored lag-first with a fixed stride.
struct DirectDesign {
  std::size_t stride = 0;
  std::vector<double> observed;
  std::vector<int> day;
  std::vector<double> depth;  ///< depth lags
  std::vector<std::size_t> index;
  // Rows with no snow today or on any lagged day contribute a term that
  // depends only on the season day; the likelihood sums them by day.
  std::vector<std::size_t> active;  ///< all other rows
  std::array<double, 367> bare_by_day{};
  std::size_t size() const { return observed.size(); }
  std::span<const double> depth_lags(std::size_t i) const { return {depth.data() + i * stride, stride}; }
};

inline DirectDesign make_direct_design(const Dataset& data, int max_lag) {
  DirectDesign d;
  d.stride = static_cast<std::size_t>(max_lag);
  for (const auto& r : contiguous_windows(data, kSnowDepth, max_lag)) {
    for (std::size_t t = r.first + max_lag; t < r.last; ++t) {
      const double today = *data[t].snow_depth;
      const int day = season_day(data[t].date).value;
      bool bare = today == 0.0;
      d.observed.push_back(today);
      d.day.push_back(day);
      for (int j = 1; j <= max_lag; ++j) {
        d.depth.push_back(*data[t - j].snow_depth);
        bare = bare && d.depth.back() == 0.0;
      }
      if (bare) d.bare_by_day[day] += 1.0;
      else d.active.push_back(d.index.size());
      d.index.push_back(t);
    }
  }
  return d;
}

/// Calls fn(i, mean, reference_depth) for each design row.
template <typename Fn>
void for_each_direct_term(const DirectParams& p, const DirectDesign& d, Fn&& fn) {
  const TrendTable h = trend_table(p.trend);
  const bool has_depth = !p.depth_lags.empty();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto lags = d.depth_lags(i);
    double eta = h[d.day[i]];
    for (std::size_t j = 0; j < p.occ_lags.size(); ++j) eta += p.occ_lags[j] * (lags[j] > 0.0 ? 1.0 : 0.0);
    eta += capped_depth_dot(p.depth_lags, lags, p.depth_cap);
    fn(i, direct_mean_from_log(eta, p.depth_cap), has_depth ? lags[0] : 0.0);
  }
}

inline double direct_log_likelihood(const DirectParams& p, const DirectDesign& d) {
  if (d.size() == 0) throw std::domain_error("no usable snow depth window");
  if (d.stride < static_cast<std::size_t>(p.max_lag()))
    throw std::invalid_argument("direct_log_likelihood: design built for fewer lags");
  const TrendTable h = trend_table(p.trend);
  const bool has_depth = !p.depth_lags.empty();
  double total = 0.0;
  for (int s = 1; s <= 366; ++s) {
    if (d.bare_by_day[s] > 0.0)
      total += d.bare_by_day[s] * log_inverse_logit(p.zero_intercept + p.zero_slope * direct_mean_from_log(h[s], p.depth_cap));
  }
  for (std::size_t i : d.active) {
    const auto lags = d.depth_lags(i);
    double eta = h[d.day[i]];
    for (std::size_t j = 0; j < p.occ_lags.size(); ++j) eta += p.occ_lags[j] * (lags[j] > 0.0 ? 1.0 : 0.0);
    eta += capped_depth_dot(p.depth_lags, lags, p.depth_cap);
    const double mean = direct_mean_from_log(eta, p.depth_cap);
    const double change = mean - (has_depth ? lags[0] : 0.0);
    const double variance = p.sigma1_sq + p.sigma2_sq * change * change;
    const double m = std::max(mean, 1e-12);
    total += zig_log_density_logit(p.zero_intercept + p.zero_slope * mean,
                                   GammaSpec{(m / variance) * m, variance / m}, d.observed[i]);
  }
  return total;
}

inline double direct_log_likelihood(const DirectParams& p, const Dataset& data) {
  return direct_log_likelihood(p, make_direct_design(data, p.max_lag()));
}

/// Lag histories of one simulated depth path.
struct DepthState {
  LagHistory occ;
  LagHistory depth;

  DepthState() = default;
  DepthState(const DirectParams& p, std::span<const double> chronological_depths)
      : occ(p.occ_lags.size()), depth(std::max<std::size_t>(p.depth_lags.size(), 1)) {
    const std::size_t need = std::max<std::size_t>(p.max_lag(), 1);
    if (chronological_depths.size() < need) throw std::domain_error("direct model: insufficient depth history");
    for (std::size_t j = need; j >= 1; --j) push(chronological_depths[chronological_depths.size() - j]);
  }

  void push(double d) {
    occ.push(d > 0.0 ? 1.0 : 0.0);
    depth.push(d);
  }
};

/// Draw the next depth and advance the histories.
inline double direct_simulate_step(const DirectParams& p, SeasonDay s, DepthState& state, RandomStream& rng) {
  const ZeroInflatedSpec spec = direct_transition_spec(p, s, state.occ.lags(), state.depth.lags());
  const double next = zig_sample(spec, rng);
  state.push(next);
  return next;
}

}  // namespace snowcast
