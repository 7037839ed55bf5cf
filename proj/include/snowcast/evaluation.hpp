#pragma once

/** @file
 * Goodness of fit through the probability integral transform, and
 * forecast skill through leave-one-season-out cross-validation.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "snowcast/csv.hpp"
#include "snowcast/dataset.hpp"
#include "snowcast/direct.hpp"
#include "snowcast/estimation.hpp"
#include "snowcast/forecast.hpp"
#include "snowcast/parallel.hpp"
#include "snowcast/random.hpp"
#include "snowcast/short_term.hpp"
#include "snowcast/weather.hpp"
#include "snowcast/zig.hpp"

namespace snowcast {

inline std::vector<int> winter_months() { return {12, 1, 2}; }
inline std::vector<int> all_months() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}; }

inline bool month_selected(std::span<const int> months, const Date& d) {
  return std::find(months.begin(), months.end(), month_of(d)) != months.end();
}

// ---------------------------------------------------------------------------
// PIT

struct PitOptions {
  std::vector<int> months = winter_months();
  bool randomized = true;  ///< uniform on [0, F(0)] for exact zeros; F(0) otherwise
  std::uint64_t seed = 0;  ///< randomization stream
  int bins = 20;
};

struct PitReport {
  std::vector<double> values;
  std::vector<std::size_t> index;  ///< dataset index of each value
  std::vector<std::size_t> histogram;
  double ks_statistic = 0.0;
  std::size_t n = 0;
};

/// Two-sided one-sample KS distance from the uniform distribution.
inline double ks_uniform_statistic(std::vector<double> values) {
  if (values.empty()) throw std::domain_error("ks_uniform_statistic: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = std::clamp(values[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic critical value with Stephens' finite-sample adjustment.
inline double ks_critical_value(std::size_t n, double alpha = 0.01) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("ks_critical_value: invalid arguments");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double rn = std::sqrt(static_cast<double>(n));
  return c / (rn + 0.12 + 0.11 / rn);
}

/// Asymptotic p-value, same adjustment.
inline double ks_p_value(double statistic, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

inline std::vector<std::size_t> pit_histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw std::invalid_argument("pit_histogram: bins must be positive");
  std::vector<std::size_t> h(bins, 0);
  for (double v : values) {
    const int b = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
    ++h[b];
  }
  return h;
}

/// PIT of `x` under a zero-inflated spec; `u` in (0,1) randomizes the atom.
inline double pit_value(const ZeroInflatedSpec& spec, double x, double u, bool randomized) {
  if (x == 0.0) return randomized ? u * spec.p_zero : spec.p_zero;
  return std::clamp(zig_cdf(spec, x), 0.0, 1.0);
}

namespace detail {

class PitBuilder {
 public:
  PitBuilder(const Dataset& data, const PitOptions& options) : data_(data), options_(options) {}

  bool wanted(std::size_t t) const { return month_selected(options_.months, data_[t].date); }

  void add_zig(std::size_t t, const ZeroInflatedSpec& spec, double x) {
    // Each observation's uniform depends only on its index, so filters and
    // model changes leave the other draws untouched.
    const double u = x == 0.0 && options_.randomized ? RandomStream::substream(options_.seed, t).uniform() : 0.0;
    add(t, pit_value(spec, x, u, options_.randomized));
  }

  void add(std::size_t t, double v) {
    report_.values.push_back(v);
    report_.index.push_back(t);
  }

  PitReport finish() && {
    if (report_.values.empty()) throw std::domain_error("no usable observations");
    report_.n = report_.values.size();
    report_.histogram = pit_histogram(report_.values, options_.bins);
    report_.ks_statistic = ks_uniform_statistic(report_.values);
    return std::move(report_);
  }

 private:
  const Dataset& data_;
  const PitOptions& options_;
  PitReport report_;
};

}  // namespace detail

/// One-step PIT with observed weather and yesterday's observed depth.
inline PitReport pit_short_term(const ShortTermParams& p, const Dataset& data, const PitOptions& options = {}) {
  detail::PitBuilder b(data, options);
  for (const auto& s : short_term_transitions(data))
    if (b.wanted(s.index)) b.add_zig(s.index, transition_spec(p, s.inputs), s.observed);
  return std::move(b).finish();
}

inline PitReport pit_direct(const DirectParams& p, const Dataset& data, const PitOptions& options = {}) {
  detail::PitBuilder b(data, options);
  const DirectDesign d = make_direct_design(data, p.max_lag());
  for_each_direct_term(p, d, [&](std::size_t i, double mean, double reference) {
    if (b.wanted(d.index[i])) b.add_zig(d.index[i], direct_spec_from_mean(p, mean, reference), d.observed[i]);
  });
  return std::move(b).finish();
}

inline PitReport pit_temperature(const TempParams& p, const Dataset& data, const PitOptions& options) {
  detail::PitBuilder b(data, options);
  for_each_temp_residual(p, make_temp_design(data), [&](std::size_t t, double e) {
    if (b.wanted(t)) b.add(t, normal_cdf(e / p.innovation_sd));
  });
  return std::move(b).finish();
}

inline PitReport pit_precipitation(const PrecipParams& p, const Dataset& data, const PitOptions& options) {
  detail::PitBuilder b(data, options);
  const PrecipDesign d = make_precip_design(data, p.max_occ_lag());
  for_each_precip_term(p, d, [&](std::size_t i, double zero_logit, const GammaSpec& g) {
    if (b.wanted(d.index[i])) b.add_zig(d.index[i], ZeroInflatedSpec{inverse_logit(zero_logit), g}, d.precip[i]);
  });
  return std::move(b).finish();
}

using AnyModel = std::variant<ShortTermParams, TempParams, PrecipParams, DirectParams>;

/// Winter months for snow models, the whole year for weather models.
inline std::vector<int> default_pit_months(const AnyModel& m) {
  return std::holds_alternative<ShortTermParams>(m) || std::holds_alternative<DirectParams>(m) ? winter_months()
                                                                                                 : all_months();
}

inline PitReport pit_series(const AnyModel& model, const Dataset& data, const PitOptions& options) {
  return std::visit(
      [&](const auto& p) -> PitReport {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ShortTermParams>) return pit_short_term(p, data, options);
        else if constexpr (std::is_same_v<P, TempParams>) return pit_temperature(p, data, options);
        else if constexpr (std::is_same_v<P, PrecipParams>) return pit_precipitation(p, data, options);
        else return pit_direct(p, data, options);
      },
      model);
}

inline void write_pit_csv(std::ostream& out, const PitReport& r) {
  out << "pit\n";
  for (double v : r.values) out << format_double(v) << '\n';
}

inline void write_pit_histogram_csv(std::ostream& out, const PitReport& r) {
  out << "bin,lower,upper,count\n";
  const auto bins = static_cast<int>(r.histogram.size());
  for (int b = 0; b < bins; ++b) {
    out << b + 1 << ',' << format_double(static_cast<double>(b) / bins) << ','
        << format_double(static_cast<double>(b + 1) / bins) << ',' << r.histogram[b] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Forecast skill

inline double mae(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size()) throw std::domain_error("mae: length mismatch");
  if (observed.empty()) throw std::domain_error("mae: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) s += std::abs(observed[i] - predicted[i]);
  return s / static_cast<double>(observed.size());
}

/// July 1 to June 30, labelled by the starting year.
struct Season {
  int start_year = 0;
  IndexRange range;  ///< dataset indices inside the season
};

inline std::vector<Season> seasons_of(const Dataset& data) {
  std::vector<Season> out;
  if (data.empty()) return out;
  auto season_year = [](const Date& d) {
    const int y = static_cast<int>(d.year());
    return month_of(d) >= 7 ? y : y - 1;
  };
  std::size_t first = 0;
  for (std::size_t i = 1; i <= data.size(); ++i) {
    if (i == data.size() || season_year(data[i].date) != season_year(data[first].date)) {
      out.push_back({season_year(data[first].date), {first, i}});
      first = i;
    }
  }
  return out;
}

/// Copy of `data` with every field of `held_out` removed.
inline Dataset mask_range(const Dataset& data, const IndexRange& held_out) {
  std::vector<DailyRecord> records = data.records();
  for (std::size_t i = held_out.first; i < held_out.last; ++i) records[i] = DailyRecord{records[i].date, {}, {}, {}};
  return Dataset(std::move(records), data.station_label());
}

/// Mean observed depth over the given months, all years.
inline double mean_depth(const Dataset& data, std::span<const int> months) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : data)
    if (r.snow_depth && month_selected(months, r.date)) {
      s += *r.snow_depth;
      ++n;
    }
  return n > 0 ? s / static_cast<double>(n) : 0.0;
}

struct SkillReport {
  std::string model;  ///< "model1", "model2" or "baseline"
  int delta = 0;
  int horizon = 0;
  std::vector<int> months;
  std::vector<double> mae;           ///< per lead 1..horizon, cm
  std::vector<std::size_t> count;    ///< forecasts contributing per lead
  double mean_depth = 0.0;           ///< normalizer, cm

  /// MAE divided by mean_depth; NaN when the station never has snow.
  std::vector<double> normalized_mae() const {
    std::vector<double> out(mae.size());
    for (std::size_t i = 0; i < mae.size(); ++i)
      out[i] = mean_depth > 0.0 ? mae[i] / mean_depth : std::numeric_limits<double>::quiet_NaN();
    return out;
  }
};

struct CrossValidationConfig {
  std::vector<LongTermModel> models{LongTermModel::model2};
  std::vector<int> deltas{0, 5, 10};
  int horizon = 21;
  std::vector<int> months = winter_months();
  int n_paths = 1000;
  std::uint64_t seed = 0;
  FitConfig fit;
  TempOrders temp_orders{2, 3};
  PrecipOrders precip_orders{3, 5, 4, 3, 5, 4};
  DirectOrders direct_orders{3, 1, 5};
  unsigned threads = 1;  ///< held-out seasons evaluated concurrently
  /// Called with every training set and the range it must not reveal.
  std::function<void(const Dataset& training, const IndexRange& held_out)> on_training_data;

  void validate() const {
    if (horizon < 1 || n_paths < 1) throw std::invalid_argument("cross_validate: horizon and n_paths must be positive");
    for (int d : deltas)
      if (d < 0 || d > horizon) throw std::invalid_argument("cross_validate: delta outside [0, horizon]");
    for (auto m : models)
      if (m == LongTermModel::none) throw std::invalid_argument("cross_validate: long-term model required");
    fit.validate();
  }
};

struct CrossValidationResult {
  std::vector<SkillReport> reports;  ///< models x deltas, in configuration order
  SkillReport baseline;
  std::vector<std::string> notices;
  std::size_t seasons_evaluated = 0;
};

namespace detail {

struct SeasonModels {
  std::optional<ShortTermParams> short_term;
  std::optional<DirectParams> direct;
  std::optional<TempParams> temp;
  std::optional<PrecipParams> precip;
  DirectParams baseline;
};

struct SeasonOutcome {
  std::vector<std::vector<double>> abs_error;  ///< [report][lead] sums
  std::vector<std::vector<std::size_t>> count;
  std::string notice;
  bool evaluated = false;
};

inline bool finite_range(const Dataset& data, std::size_t first, std::size_t last, FieldSet fields) {
  for (std::size_t i = first; i < last; ++i)
    if (!has_fields(data[i], fields)) return false;
  return true;
}

inline std::string season_name(int start_year) {
  return std::to_string(start_year) + "/" + std::to_string(start_year + 1);
}

}  // namespace detail

/**
 * Leave-one-season-out evaluation. For each July-June season: fit every
 * model on the other seasons, then forecast from each start day in the
 * selected months with observed weather for the first delta days, and
 * accumulate |ensemble mean - observed| per lead. The periodic-only
 * baseline is the direct model with no lags, issued with delta = 0.
 */
inline CrossValidationResult cross_validate(const Dataset& data, const CrossValidationConfig& config) {
  config.validate();
  const auto seasons = seasons_of(data);
  if (seasons.size() < 3) throw std::domain_error("cross_validate: at least three seasons required");

  const bool need_short = std::any_of(config.deltas.begin(), config.deltas.end(), [](int d) { return d > 0; });
  const bool need_m1 = std::find(config.models.begin(), config.models.end(), LongTermModel::model1) != config.models.end();
  const bool need_m2 = std::find(config.models.begin(), config.models.end(), LongTermModel::model2) != config.models.end();
  const std::size_t n_reports = config.models.size() * config.deltas.size();
  const int H = config.horizon;

  // History needed by every configuration, so all curves share start days.
  std::size_t depth_lags = 1, temp_lags = 0, precip_lags = 0;
  if (need_m2) depth_lags = std::max<std::size_t>(depth_lags, std::max(config.direct_orders.q, config.direct_orders.s));
  if (need_m1) {
    temp_lags = config.temp_orders.p;
    precip_lags = std::max(config.precip_orders.q_amount, config.precip_orders.q_zero);
  }
  const std::size_t history = std::max({depth_lags, temp_lags, precip_lags, std::size_t{1}});
  const int max_delta = *std::max_element(config.deltas.begin(), config.deltas.end());

  std::vector<detail::SeasonOutcome> outcomes(seasons.size());
  parallel_for(seasons.size(), [&](std::size_t k) {
    const Season& season = seasons[k];
    auto& out = outcomes[k];
    out.abs_error.assign(n_reports + 1, std::vector<double>(H, 0.0));
    out.count.assign(n_reports + 1, std::vector<std::size_t>(H, 0));

    // Start days: selected months, full lag history, observed depth over the
    // horizon and observed weather over the longest delta.
    std::vector<std::size_t> starts;
    bool any_winter_depth = false;
    for (std::size_t t = season.range.first; t < season.range.last; ++t) {
      if (!month_selected(config.months, data[t].date)) continue;
      if (data[t].snow_depth) any_winter_depth = true;
      if (t + 1 < history || t + H >= data.size()) continue;
      if (!detail::finite_range(data, t + 1 - depth_lags, t + 1, kSnowDepth)) continue;
      if (temp_lags > 0 && !detail::finite_range(data, t + 1 - temp_lags, t + 1, kTemperature)) continue;
      if (precip_lags > 0 && !detail::finite_range(data, t + 1 - precip_lags, t + 1, kPrecipitation)) continue;
      if (!detail::finite_range(data, t + 1, t + 1 + H, kSnowDepth)) continue;
      if (max_delta > 0 && !detail::finite_range(data, t + 1, t + 1 + max_delta, kTemperature | kPrecipitation)) continue;
      starts.push_back(t);
    }
    if (!any_winter_depth) {
      out.notice = "season " + detail::season_name(season.start_year) + " skipped: no winter observations";
      return;
    }
    if (starts.empty()) {
      out.notice = "season " + detail::season_name(season.start_year) + " skipped: no complete forecast window";
      return;
    }

    const Dataset training = mask_range(data, season.range);
    if (config.on_training_data) config.on_training_data(training, season.range);

    detail::SeasonModels models;
    if (need_short) models.short_term = fit_short_term(training, config.fit).params;
    if (need_m2) models.direct = fit_direct(training, config.direct_orders, config.fit).params;
    if (need_m1) {
      models.temp = fit_temperature(training, config.temp_orders, config.fit).params;
      models.precip = fit_precipitation(training, config.precip_orders, config.fit).params;
    }
    models.baseline = fit_direct(training, DirectOrders{config.direct_orders.m, 0, 0}, config.fit).params;

    std::vector<double> mean(H);
    auto accumulate = [&](std::size_t report, std::size_t t, const ForecastEnsemble& e) {
      for (int d = 0; d < H; ++d) {
        double s = 0.0;
        for (int p = 0; p < e.n_paths; ++p) s += e.depth(p, d);
        mean[d] = s / e.n_paths;
        out.abs_error[report][d] += std::abs(mean[d] - *data[t + 1 + d].snow_depth);
        ++out.count[report][d];
      }
    };

    for (std::size_t t : starts) {
      ForecastRequest req;
      req.history = history_from(data, t, history);
      req.horizon = H;
      req.n_paths = config.n_paths;
      std::size_t report = 0;
      for (auto model : config.models) {
        for (int delta : config.deltas) {
          req.weather_forecast.clear();
          for (int i = 1; i <= delta; ++i) req.weather_forecast.push_back({*data[t + i].temperature, *data[t + i].precipitation});
          req.seed = derive_seed(config.seed, t, report);
          const ShortTermParams* st = models.short_term ? &*models.short_term : nullptr;
          const ForecastEnsemble e = model == LongTermModel::model2
                                         ? forecast_long_model2(st, *models.direct, req)
                                         : forecast_long_model1(*models.short_term, *models.temp, *models.precip, req);
          accumulate(report, t, e);
          ++report;
        }
      }
      req.weather_forecast.clear();
      req.seed = derive_seed(config.seed, t, n_reports);
      accumulate(n_reports, t, forecast_long_model2(nullptr, models.baseline, req));
    }
    out.evaluated = true;
  }, config.threads);

  CrossValidationResult result;
  const double normalizer = mean_depth(data, config.months);
  auto blank = [&](std::string model, int delta) {
    SkillReport r;
    r.model = std::move(model);
    r.delta = delta;
    r.horizon = H;
    r.months = config.months;
    r.mae.assign(H, 0.0);
    r.count.assign(H, 0);
    r.mean_depth = normalizer;
    return r;
  };
  for (auto model : config.models)
    for (int delta : config.deltas) result.reports.push_back(blank(to_string(model), delta));
  result.baseline = blank("baseline", 0);

  // Chronological reduction.
  for (const auto& o : outcomes) {
    if (!o.notice.empty()) result.notices.push_back(o.notice);
    if (!o.evaluated) continue;
    ++result.seasons_evaluated;
    for (std::size_t r = 0; r <= n_reports; ++r) {
      SkillReport& target = r < n_reports ? result.reports[r] : result.baseline;
      for (int d = 0; d < H; ++d) {
        target.mae[d] += o.abs_error[r][d];
        target.count[d] += o.count[r][d];
      }
    }
  }
  if (result.seasons_evaluated == 0) throw std::domain_error("cross_validate: no season could be evaluated");
  auto finish = [](SkillReport& r) {
    for (std::size_t d = 0; d < r.mae.size(); ++d) r.mae[d] = r.count[d] > 0 ? r.mae[d] / r.count[d] : 0.0;
  };
  for (auto& r : result.reports) finish(r);
  finish(result.baseline);
  return result;
}

inline void write_skill_csv(std::ostream& out, const SkillReport& r) {
  const auto normalized = r.normalized_mae();
  out << "lead,mae_cm,normalized_mae\n";
  for (std::size_t d = 0; d < r.mae.size(); ++d)
    out << d + 1 << ',' << format_double(r.mae[d]) << ','
        << (std::isfinite(normalized[d]) ? format_double(normalized[d]) : std::string{}) << '\n';
}

}  // namespace snowcast
