#pragma once

/** @file
 * Monte Carlo snow-depth forecasts.
 *
 * For the first delta days each path follows the short-term model driven by
 * the supplied weather. After that a path continues either with the direct
 * snow-depth model (model 2) or by simulating temperature and precipitation
 * and feeding them to the short-term model (model 1).
 *
 * Path i draws only from RandomStream::substream(seed, i); an ensemble is a
 * pure function of the request.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snowcast/csv.hpp"
#include "snowcast/dataset.hpp"
#include "snowcast/direct.hpp"
#include "snowcast/parallel.hpp"
#include "snowcast/random.hpp"
#include "snowcast/short_term.hpp"
#include "snowcast/weather.hpp"

namespace snowcast {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

enum class LongTermModel { none, model1, model2 };

inline std::string to_string(LongTermModel m) {
  switch (m) {
    case LongTermModel::model1: return "model1";
    case LongTermModel::model2: return "model2";
    default: return "none";
  }
}

/// Observed series up to and including the issue day, oldest first.
/// Missing values are NaN.
struct ForecastHistory {
  Date last_date{};
  std::vector<double> temps;
  std::vector<double> precips;
  std::vector<double> depths;
};

/// The `length` days ending at `index` (fewer if the series starts later).
inline ForecastHistory history_from(const Dataset& data, std::size_t index, std::size_t length) {
  if (index >= data.size()) throw std::out_of_range("history_from: index outside dataset");
  ForecastHistory h;
  h.last_date = data[index].date;
  const std::size_t first = index + 1 >= length ? index + 1 - length : 0;
  for (std::size_t i = first; i <= index; ++i) {
    h.temps.push_back(data[i].temperature.value_or(kMissing));
    h.precips.push_back(data[i].precipitation.value_or(kMissing));
    h.depths.push_back(data[i].snow_depth.value_or(kMissing));
  }
  return h;
}

struct WeatherDay {
  double temp = 0.0;
  double precip = 0.0;
};

struct ForecastRequest {
  ForecastHistory history;
  std::vector<WeatherDay> weather_forecast;  ///< days 1..delta
  int horizon = 1;
  int n_paths = 1000;
  std::uint64_t seed = 0;
  LongTermModel long_term_model = LongTermModel::none;
  unsigned threads = 1;

  int delta() const { return static_cast<int>(weather_forecast.size()); }

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("forecast: horizon must be at least 1");
    if (n_paths < 1) throw std::invalid_argument("forecast: n_paths must be at least 1");
    if (delta() > horizon) throw std::invalid_argument("forecast: more weather days than horizon");
    if (delta() < horizon && long_term_model == LongTermModel::none)
      throw std::invalid_argument("forecast: horizon beyond weather forecast needs a long-term model");
    for (const auto& w : weather_forecast)
      if (!std::isfinite(w.temp) || !(w.precip >= 0.0))
        throw std::invalid_argument("forecast: invalid weather forecast value");
  }
};

/// Simulated paths, row-major (path, day). Day index 0 is the day after
/// the issue date. Weather is NaN where the model does not simulate it.
struct ForecastEnsemble {
  int n_paths = 0;
  int horizon = 0;
  Date issue_date{};
  std::uint64_t seed = 0;
  std::string model;
  std::vector<double> depths;
  std::vector<double> temps;
  std::vector<double> precips;

  double depth(int path, int day) const { return depths[static_cast<std::size_t>(path) * horizon + day]; }
  double temp(int path, int day) const { return temps[static_cast<std::size_t>(path) * horizon + day]; }
  double precip(int path, int day) const { return precips[static_cast<std::size_t>(path) * horizon + day]; }
  Date date(int day) const { return add_days(issue_date, day + 1); }
};

namespace detail {

inline std::span<const double> tail(const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() < n) throw std::domain_error(std::string("forecast: insufficient ") + what + " history");
  std::span<const double> s(v.data() + v.size() - n, n);
  for (double x : s)
    if (!std::isfinite(x)) throw std::domain_error(std::string("forecast: missing ") + what + " in history");
  return s;
}

struct ForecastModels {
  const ShortTermParams* short_term = nullptr;
  const DirectParams* direct = nullptr;
  const TempParams* temp = nullptr;
  const PrecipParams* precip = nullptr;
};

inline ForecastEnsemble run_forecast(const ForecastModels& models, const ForecastRequest& req) {
  req.validate();
  const int delta = req.delta();
  const int H = req.horizon;
  const bool long_term = delta < H;
  if (delta > 0 && !models.short_term) throw std::invalid_argument("forecast: short-term parameters required");
  const double start_depth = tail(req.history.depths, 1, "depth")[0];

  // Per-model starting histories, validated once.
  DepthState direct_start;
  LagHistory dev_start;
  LagHistory occ_start;
  if (long_term && req.long_term_model == LongTermModel::model2) {
    if (!models.direct) throw std::invalid_argument("forecast: direct model parameters required");
    const std::size_t need = std::max<std::size_t>(models.direct->max_lag(), 1);
    direct_start = DepthState(*models.direct, tail(req.history.depths, need, "depth"));
  }
  if (long_term && req.long_term_model == LongTermModel::model1) {
    if (!models.temp || !models.precip || !models.short_term)
      throw std::invalid_argument("forecast: model1 needs short-term, temperature and precipitation parameters");
    const std::size_t p = models.temp->ar.size();
    dev_start = temp_deviation_history(*models.temp, req.history.last_date, tail(req.history.temps, p, "temperature"));
    const std::size_t q = models.precip->max_occ_lag();
    const auto occ_src = tail(req.history.precips, q, "precipitation");
    occ_start = LagHistory(q);
    for (double r : occ_src) occ_start.push(r > 0.0 ? 1.0 : 0.0);
  }

  ForecastEnsemble e;
  e.n_paths = req.n_paths;
  e.horizon = H;
  e.issue_date = req.history.last_date;
  e.seed = req.seed;
  e.model = delta == H ? "short_term" : to_string(req.long_term_model);
  const std::size_t cells = static_cast<std::size_t>(req.n_paths) * H;
  e.depths.assign(cells, 0.0);
  e.temps.assign(cells, kMissing);
  e.precips.assign(cells, kMissing);

  std::vector<SeasonDay> days(H);
  for (int i = 0; i < H; ++i) days[i] = season_day(add_days(req.history.last_date, i + 1));

  parallel_for(static_cast<std::size_t>(req.n_paths), [&](std::size_t path) {
    RandomStream rng = RandomStream::substream(req.seed, path);
    DepthState direct_state = direct_start;
    LagHistory dev = dev_start;
    LagHistory occ = occ_start;
    double depth = start_depth;
    const std::size_t row = path * H;
    for (int i = 0; i < H; ++i) {
      double temp = kMissing;
      double precip = kMissing;
      if (i < delta) {
        temp = req.weather_forecast[i].temp;
        precip = req.weather_forecast[i].precip;
        depth = zig_sample(transition_spec(*models.short_term, {temp, precip, depth}), rng);
        if (long_term) {
          direct_state.push(depth);
          if (req.long_term_model == LongTermModel::model1) {
            dev.push(temp - fourier_eval(models.temp->trend, days[i]));
            occ.push(precip > 0.0 ? 1.0 : 0.0);
          }
        }
      } else if (req.long_term_model == LongTermModel::model2) {
        depth = direct_simulate_step(*models.direct, days[i], direct_state, rng);
      } else {
        temp = temp_step(*models.temp, days[i], dev, rng);
        precip = precip_simulate(*models.precip, days[i], occ, temp, rng).precip;
        depth = zig_sample(transition_spec(*models.short_term, {temp, precip, depth}), rng);
      }
      e.depths[row + i] = depth;
      e.temps[row + i] = temp;
      e.precips[row + i] = precip;
    }
  }, req.threads);
  return e;
}

}  // namespace detail

/// Track the depth distribution through the supplied weather forecast.
inline ForecastEnsemble forecast_short(const ShortTermParams& short_term, const ForecastRequest& req) {
  if (req.delta() != req.horizon) throw std::invalid_argument("forecast_short: weather forecast must cover the horizon");
  return detail::run_forecast({&short_term, nullptr, nullptr, nullptr}, req);
}

/// Short-term tracking for delta days, then the direct depth model. With
/// delta = 0 the short-term parameters may be null.
inline ForecastEnsemble forecast_long_model2(const ShortTermParams* short_term, const DirectParams& direct,
                                             ForecastRequest req) {
  req.long_term_model = LongTermModel::model2;
  return detail::run_forecast({short_term, &direct, nullptr, nullptr}, req);
}

inline ForecastEnsemble forecast_long_model1(const ShortTermParams& short_term, const TempParams& temp,
                                             const PrecipParams& precip, ForecastRequest req) {
  req.long_term_model = LongTermModel::model1;
  return detail::run_forecast({&short_term, nullptr, &temp, &precip}, req);
}

// ---------------------------------------------------------------------------
// Summaries and export

struct ForecastSummary {
  std::vector<double> mean;                    ///< per day
  std::vector<double> probabilities;           ///< requested quantile levels
  std::vector<std::vector<double>> quantiles;  ///< [level][day]
};

/// Empirical quantile with linear interpolation between order statistics
/// (position (n - 1) p in the sorted sample).
inline double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::domain_error("empirical_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("empirical_quantile: level outside [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline ForecastSummary summarize(const ForecastEnsemble& e, std::span<const double> probabilities) {
  ForecastSummary s;
  s.probabilities.assign(probabilities.begin(), probabilities.end());
  s.mean.assign(e.horizon, 0.0);
  s.quantiles.assign(probabilities.size(), std::vector<double>(e.horizon, 0.0));
  std::vector<double> column(e.n_paths);
  for (int d = 0; d < e.horizon; ++d) {
    double total = 0.0;
    for (int p = 0; p < e.n_paths; ++p) {
      column[p] = e.depth(p, d);
      total += column[p];
    }
    s.mean[d] = total / e.n_paths;
    if (probabilities.empty()) continue;
    std::sort(column.begin(), column.end());
    for (std::size_t k = 0; k < probabilities.size(); ++k) s.quantiles[k][d] = empirical_quantile(column, probabilities[k]);
  }
  return s;
}

/// Column label for a quantile level, e.g. 0.05 -> "q05", 0.5 -> "q50".
inline std::string quantile_label(double p) {
  const double pct = p * 100.0;
  char buf[32];
  if (std::abs(pct - std::round(pct)) < 1e-9) std::snprintf(buf, sizeof buf, "q%02d", static_cast<int>(std::round(pct)));
  else std::snprintf(buf, sizeof buf, "q%g", pct);
  return buf;
}

namespace detail {
inline std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string{}; }
}  // namespace detail

inline void write_ensemble_csv(std::ostream& out, const ForecastEnsemble& e) {
  out << "# seed=" << e.seed << " model=" << e.model << '\n';
  out << "path,day,date,temp,precip,depth\n";
  for (int p = 0; p < e.n_paths; ++p) {
    for (int d = 0; d < e.horizon; ++d) {
      out << p << ',' << d + 1 << ',' << format_date(e.date(d)) << ',' << detail::cell(e.temp(p, d)) << ','
          << detail::cell(e.precip(p, d)) << ',' << detail::cell(e.depth(p, d)) << '\n';
    }
  }
}

inline void write_summary_csv(std::ostream& out, const ForecastEnsemble& e, const ForecastSummary& s) {
  out << "# seed=" << e.seed << " model=" << e.model << '\n';
  out << "day,date,mean";
  for (double p : s.probabilities) out << ',' << quantile_label(p);
  out << '\n';
  for (int d = 0; d < e.horizon; ++d) {
    out << d + 1 << ',' << format_date(e.date(d)) << ',' << format_double(s.mean[d]);
    for (const auto& q : s.quantiles) out << ',' << format_double(q[d]);
    out << '\n';
  }
}

}  // namespace snowcast
