#pragma once

/** @file
 * Stochastic weather generator used for long-range snow forecasts.
 *
 * Temperature: AR(p) on deviations from a seasonal Fourier trend with
 * Gaussian innovations.
 *
 * Precipitation: zero-inflated gamma. Wet-day amount has log-linked mean
 * and constant shape; the dry-day probability is logit-linked. Both
 * predictors combine a Fourier trend, lagged wet/dry indicators and a
 * polynomial in today's (standardized) temperature.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "snowcast/dataset.hpp"
#include "snowcast/fourier.hpp"
#include "snowcast/random.hpp"
#include "snowcast/zig.hpp"

namespace snowcast {

// ---------------------------------------------------------------------------
// Temperature

struct TempParams {
  FourierTrend trend;
  std::vector<double> ar;  ///< alpha_1..alpha_p
  double innovation_sd = 1.0;

  int ar_order() const { return static_cast<int>(ar.size()); }
  int free_parameters() const { return trend.free_parameters() + ar_order() + 1; }

  void validate() const {
    trend.validate();
    if (!(innovation_sd > 0.0)) throw std::invalid_argument("TempParams: innovation_sd must be positive");
  }
};

/// Gap-free temperature runs with their season days, ready for repeated
/// likelihood evaluation.
struct TempDesign {
  struct Window {
    std::vector<double> temp;
    std::vector<int> day;
    std::size_t first_index = 0;  ///< dataset index of temp[0]
  };
  std::vector<Window> windows;
  /// Leading values of each window that are conditioned on regardless of
  /// the AR order, so likelihoods of different orders share their terms.
  std::size_t condition = 0;

  std::size_t first_term(int p) const { return std::max(condition, static_cast<std::size_t>(p)); }
  std::size_t usable_terms(int p) const {
    const std::size_t skip = first_term(p);
    std::size_t n = 0;
    for (const auto& w : windows)
      if (w.temp.size() > skip) n += w.temp.size() - skip;
    return n;
  }
};

inline TempDesign make_temp_design(const Dataset& data, int condition = 0) {
  TempDesign d;
  d.condition = static_cast<std::size_t>(std::max(condition, 0));
  for (const auto& r : contiguous_windows(data, kTemperature)) {
    TempDesign::Window w;
    w.first_index = r.first;
    for (std::size_t i = r.first; i < r.last; ++i) {
      w.temp.push_back(*data[i].temperature);
      w.day.push_back(season_day(data[i].date).value);
    }
    d.windows.push_back(std::move(w));
  }
  return d;
}

/// Calls fn(dataset_index, residual) for every conditional term, in order.
template <typename Fn>
void for_each_temp_residual(const TempParams& p, const TempDesign& design, Fn&& fn) {
  const TrendTable h = trend_table(p.trend);
  const std::size_t order = p.ar.size();
  const std::size_t skip = design.first_term(p.ar_order());
  std::vector<double> dev;
  for (const auto& w : design.windows) {
    if (w.temp.size() <= skip) continue;
    dev.resize(w.temp.size());
    for (std::size_t i = 0; i < w.temp.size(); ++i) dev[i] = w.temp[i] - h[w.day[i]];
    for (std::size_t i = skip; i < w.temp.size(); ++i) {
      double pred = 0.0;
      for (std::size_t j = 1; j <= order; ++j) pred += p.ar[j - 1] * dev[i - j];
      fn(w.first_index + i, dev[i] - pred);
    }
  }
}

/// Gaussian log-likelihood conditional on the first max(p, condition)
/// values of each window.
inline double temp_log_likelihood(const TempParams& p, const TempDesign& design) {
  if (design.usable_terms(p.ar_order()) == 0) throw std::domain_error("no usable temperature window");
  const double var = p.innovation_sd * p.innovation_sd;
  const double norm = -0.5 * std::log(2.0 * std::numbers::pi * var);
  double total = 0.0;
  for_each_temp_residual(p, design, [&](std::size_t, double e) { total += norm - 0.5 * e * e / var; });
  return total;
}

inline double temp_log_likelihood(const TempParams& p, const Dataset& data) {
  return temp_log_likelihood(p, make_temp_design(data));
}

/// Trend deviations of recent observed temperatures, lag-first.
/// `last_date` is the date of the final element of the chronological series.
inline LagHistory temp_deviation_history(const TempParams& p, const Date& last_date,
                                         std::span<const double> chronological) {
  const std::size_t order = p.ar.size();
  if (chronological.size() < order) throw std::domain_error("temp_simulate: insufficient history");
  LagHistory h(order);
  for (std::size_t j = order; j >= 1; --j) {
    const double t = chronological[chronological.size() - j];
    const Date d = add_days(last_date, -static_cast<long long>(j - 1));
    h.push(t - fourier_eval(p.trend, season_day(d)));
  }
  return h;
}

/// Draw the temperature for a day with season day `s`; pushes the new
/// deviation into `deviations`.
inline double temp_step(const TempParams& p, SeasonDay s, LagHistory& deviations, RandomStream& rng) {
  const double dev = lag_dot(p.ar, deviations.lags()) + p.innovation_sd * rng.normal();
  deviations.push(dev);
  return fourier_eval(p.trend, s) + dev;
}

/// Simulate `horizon` days following a chronological history ending on `last_date`.
inline std::vector<double> temp_simulate(const TempParams& p, const Date& last_date,
                                         std::span<const double> history, int horizon,
                                         RandomStream& rng) {
  LagHistory dev = temp_deviation_history(p, last_date, history);
  std::vector<double> out;
  out.reserve(horizon);
  for (int i = 1; i <= horizon; ++i) out.push_back(temp_step(p, season_day(add_days(last_date, i)), dev, rng));
  return out;
}

// ---------------------------------------------------------------------------
// Precipitation

struct PrecipParams {
  FourierTrend amount_trend;
  std::vector<double> amount_occ_lags;   ///< on wet indicators, lag 1 first
  std::vector<double> amount_temp_poly;  ///< powers 1..s of standardized temperature
  double amount_cv_shape = 1.0;          ///< constant gamma shape
  FourierTrend zero_trend;
  std::vector<double> zero_occ_lags;
  std::vector<double> zero_temp_poly;
  double temp_center = 0.0;  ///< temperature standardization
  double temp_scale = 1.0;

  int max_occ_lag() const {
    return static_cast<int>(std::max(amount_occ_lags.size(), zero_occ_lags.size()));
  }

  int free_parameters() const {
    return amount_trend.free_parameters() + static_cast<int>(amount_occ_lags.size()) +
           static_cast<int>(amount_temp_poly.size()) + 1 + zero_trend.free_parameters() +
           static_cast<int>(zero_occ_lags.size()) + static_cast<int>(zero_temp_poly.size());
  }

  void validate() const {
    amount_trend.validate();
    zero_trend.validate();
    if (!(amount_cv_shape > 0.0)) throw std::invalid_argument("PrecipParams: shape must be positive");
    if (!(temp_scale > 0.0)) throw std::invalid_argument("PrecipParams: temp_scale must be positive");
  }

  double standardize(double temp) const { return (temp - temp_center) / temp_scale; }
};

/// sum_{j>=1} coef[j-1] * z^j
inline double power_series(std::span<const double> coef, double z) {
  double s = 0.0;
  double zp = 1.0;
  for (double c : coef) {
    zp *= z;
    s += c * zp;
  }
  return s;
}

inline double precip_amount_log_mean(const PrecipParams& p, SeasonDay s, std::span<const double> occ,
                                     double temp) {
  return fourier_eval(p.amount_trend, s) + lag_dot(p.amount_occ_lags, occ) +
         power_series(p.amount_temp_poly, p.standardize(temp));
}

inline double precip_zero_logit(const PrecipParams& p, SeasonDay s, std::span<const double> occ,
                                double temp) {
  return fourier_eval(p.zero_trend, s) + lag_dot(p.zero_occ_lags, occ) +
         power_series(p.zero_temp_poly, p.standardize(temp));
}

/// Expected wet-day amount (mm). `occ_history` is lag-first 0/1 indicators.
inline double precip_amount_mean(const PrecipParams& p, SeasonDay s, std::span<const double> occ_history,
                                 double temp) {
  if (occ_history.size() < p.amount_occ_lags.size())
    throw std::domain_error("precip_amount_mean: insufficient occurrence history");
  return std::exp(precip_amount_log_mean(p, s, occ_history, temp));
}

inline double precip_zero_probability(const PrecipParams& p, SeasonDay s,
                                      std::span<const double> occ_history, double temp) {
  if (occ_history.size() < p.zero_occ_lags.size())
    throw std::domain_error("precip_zero_probability: insufficient occurrence history");
  return inverse_logit(precip_zero_logit(p, s, occ_history, temp));
}

inline ZeroInflatedSpec precip_spec(const PrecipParams& p, SeasonDay s, std::span<const double> occ_history,
                                    double temp) {
  const double mean = precip_amount_mean(p, s, occ_history, temp);
  return ZeroInflatedSpec{precip_zero_probability(p, s, occ_history, temp),
                          GammaSpec{p.amount_cv_shape, mean / p.amount_cv_shape}};
}

/// Precomputed precipitation terms. Occurrence lags are stored lag-first
/// with a fixed stride.
struct PrecipDesign {
  std::size_t stride = 0;
  std::vector<double> precip;
  std::vector<double> temp;
  std::vector<int> day;
  std::vector<double> occ;
  std::vector<std::size_t> index;
  std::size_t size() const { return precip.size(); }
  std::span<const double> occ_lags(std::size_t i) const { return {occ.data() + i * stride, stride}; }
};

inline PrecipDesign make_precip_design(const Dataset& data, int max_lag) {
  PrecipDesign d;
  d.stride = static_cast<std::size_t>(max_lag);
  for (const auto& r : contiguous_windows(data, kPrecipitation | kTemperature, max_lag)) {
    for (std::size_t t = r.first + max_lag; t < r.last; ++t) {
      d.precip.push_back(*data[t].precipitation);
      d.temp.push_back(*data[t].temperature);
      d.day.push_back(season_day(data[t].date).value);
      for (int j = 1; j <= max_lag; ++j) d.occ.push_back(*data[t - j].precipitation > 0.0 ? 1.0 : 0.0);
      d.index.push_back(t);
    }
  }
  return d;
}

/// Calls fn(i, zero_logit, gamma) for each design row.
template <typename Fn>
void for_each_precip_term(const PrecipParams& p, const PrecipDesign& d, Fn&& fn) {
  const TrendTable amount = trend_table(p.amount_trend);
  const TrendTable zero = trend_table(p.zero_trend);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto occ = d.occ_lags(i);
    const double z = p.standardize(d.temp[i]);
    const double log_mean = amount[d.day[i]] + lag_dot(p.amount_occ_lags, occ) + power_series(p.amount_temp_poly, z);
    const double zero_logit = zero[d.day[i]] + lag_dot(p.zero_occ_lags, occ) + power_series(p.zero_temp_poly, z);
    fn(i, zero_logit, GammaSpec{p.amount_cv_shape, std::exp(log_mean) / p.amount_cv_shape});
  }
}

inline double precip_log_likelihood(const PrecipParams& p, const PrecipDesign& d) {
  if (d.size() == 0) throw std::domain_error("no usable precipitation window");
  if (d.stride < static_cast<std::size_t>(p.max_occ_lag()))
    throw std::invalid_argument("precip_log_likelihood: design built for fewer lags");
  double total = 0.0;
  for_each_precip_term(p, d, [&](std::size_t i, double zero_logit, const GammaSpec& g) {
    total += zig_log_density_logit(zero_logit, g, d.precip[i]);
  });
  return total;
}

inline double precip_log_likelihood(const PrecipParams& p, const Dataset& data) {
  return precip_log_likelihood(p, make_precip_design(data, p.max_occ_lag()));
}

struct PrecipDraw {
  double precip = 0.0;
  int occurred = 0;
};

/// Draw one day's precipitation and push its wet indicator into `occ_history`.
inline PrecipDraw precip_simulate(const PrecipParams& p, SeasonDay s, LagHistory& occ_history, double temp,
                                  RandomStream& rng) {
  const ZeroInflatedSpec spec = precip_spec(p, s, occ_history.lags(), temp);
  const double amount = zig_sample(spec, rng);
  const int wet = amount > 0.0 ? 1 : 0;
  occ_history.push(wet);
  return {amount, wet};
}

}  // namespace snowcast
