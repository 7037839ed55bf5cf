#pragma once

/** @file
 * Maximum-likelihood fitting for every model family and forward-stepwise
 * order selection by AIC.
 *
 * Each family maps its natural parameters to an unconstrained internal
 * vector (softplus for beta0, log for variances and shapes, whitened
 * covariates for log-linear predictors) before handing the likelihood to
 * maximize().
 */

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "snowcast/dataset.hpp"
#include "snowcast/direct.hpp"
#include "snowcast/optimize.hpp"
#include "snowcast/short_term.hpp"
#include "snowcast/weather.hpp"
#include "snowcast/whitening.hpp"

namespace snowcast {

inline double aic(int free_parameters, double log_likelihood) {
  return 2.0 * free_parameters - 2.0 * log_likelihood;
}

template <typename Params>
struct FitResult {
  Params params;
  double log_likelihood = 0.0;
  double aic = 0.0;
  int free_parameters = 0;
  int iterations = 0;
  bool converged = false;
  bool at_boundary = false;  ///< the MLE lies at infinity for this data
  std::vector<double> trace;
  std::vector<double> gradient;  ///< internal-coordinate gradient at the optimum
};

// Model orders. Stepwise selection works on them as flat integer vectors in
// the order listed here, which is also the round-robin schedule.

struct TempOrders {
  int m = 0;  ///< Fourier harmonics
  int p = 0;  ///< AR order
  std::vector<int> flat() const { return {m, p}; }
  static TempOrders from_flat(const std::vector<int>& v) { return {v.at(0), v.at(1)}; }
};

struct PrecipOrders {
  int m_amount = 0, q_amount = 0, s_amount = 0;
  int m_zero = 0, q_zero = 0, s_zero = 0;
  std::vector<int> flat() const { return {m_amount, q_amount, s_amount, m_zero, q_zero, s_zero}; }
  static PrecipOrders from_flat(const std::vector<int>& v) { return {v.at(0), v.at(1), v.at(2), v.at(3), v.at(4), v.at(5)}; }
};

struct DirectOrders {
  int m = 0;  ///< Fourier harmonics
  int q = 0;  ///< occurrence lags
  int s = 0;  ///< depth lags
  std::vector<int> flat() const { return {m, q, s}; }
  static DirectOrders from_flat(const std::vector<int>& v) { return {v.at(0), v.at(1), v.at(2)}; }
};

inline TempOrders orders_of(const TempParams& p) { return {p.trend.order(), p.ar_order()}; }
inline PrecipOrders orders_of(const PrecipParams& p) {
  return {p.amount_trend.order(), static_cast<int>(p.amount_occ_lags.size()), static_cast<int>(p.amount_temp_poly.size()),
          p.zero_trend.order(),   static_cast<int>(p.zero_occ_lags.size()),   static_cast<int>(p.zero_temp_poly.size())};
}
inline DirectOrders orders_of(const DirectParams& p) {
  return {p.trend.order(), static_cast<int>(p.occ_lags.size()), static_cast<int>(p.depth_lags.size())};
}

/// Copy of `p` with the given orders; new coefficients are zero.
inline TempParams with_orders(TempParams p, const TempOrders& o) {
  p.trend.resize(o.m);
  p.ar.resize(o.p, 0.0);
  return p;
}
inline PrecipParams with_orders(PrecipParams p, const PrecipOrders& o) {
  p.amount_trend.resize(o.m_amount);
  p.amount_occ_lags.resize(o.q_amount, 0.0);
  p.amount_temp_poly.resize(o.s_amount, 0.0);
  p.zero_trend.resize(o.m_zero);
  p.zero_occ_lags.resize(o.q_zero, 0.0);
  p.zero_temp_poly.resize(o.s_zero, 0.0);
  return p;
}
inline DirectParams with_orders(DirectParams p, const DirectOrders& o) {
  p.trend.resize(o.m);
  p.occ_lags.resize(o.q, 0.0);
  p.depth_lags.resize(o.s, 0.0);
  return p;
}

// ---------------------------------------------------------------------------
// Internal parameterizations

namespace detail {

inline void push_trend(std::vector<double>& v, const FourierTrend& t) {
  v.push_back(t.a0);
  v.insert(v.end(), t.a.begin(), t.a.end());
  v.insert(v.end(), t.b.begin(), t.b.end());
}

inline void pull_trend(std::span<const double> u, std::size_t& k, FourierTrend& t) {
  t.a0 = u[k++];
  for (auto& x : t.a) x = u[k++];
  for (auto& x : t.b) x = u[k++];
}

inline void pull_vector(std::span<const double> u, std::size_t& k, std::vector<double>& v, double scale = 1.0) {
  for (auto& x : v) x = u[k++] * scale;
}

inline double softplus_inverse_clamped(double y) { return softplus_inverse(std::max(y, 1e-300)); }

/// exp() that stays a valid positive scale parameter when the optimizer
/// drifts toward a zero boundary.
inline double positive_exp(double u) { return std::max(std::exp(u), std::numeric_limits<double>::min()); }

}  // namespace detail

/// Typical covariate magnitudes; coefficients multiplying them are
/// optimized in these units so all coordinates have similar curvature.
struct ShortTermScales {
  double temp = 1.0;       ///< |T|
  double rain_temp = 1.0;  ///< |R T|
  double depth = 1.0;      ///< |E|, cm
};

inline ShortTermScales short_term_scales(std::span<const ShortTermTransition> steps) {
  double tt = 0.0, rt = 0.0, dd = 0.0;
  for (const auto& s : steps) {
    tt += s.inputs.temp * s.inputs.temp;
    rt += (s.inputs.precip * s.inputs.temp) * (s.inputs.precip * s.inputs.temp);
    dd += s.observed * s.observed;
  }
  const double n = std::max<double>(1.0, static_cast<double>(steps.size()));
  auto rms = [n](double ss) { return std::max(1.0, std::sqrt(ss / n)); };
  return {rms(tt), rms(rt), rms(dd)};
}

inline std::vector<double> to_internal(const ShortTermParams& p, const ShortTermScales& sc = {}) {
  return {p.mu,
          detail::softplus_inverse_clamped(p.beta0),
          p.beta1,
          p.beta2 * sc.temp,
          p.beta3,
          p.beta4 * sc.temp,
          p.beta5 * sc.rain_temp,
          p.beta6,
          p.beta7 * sc.depth,
          std::log(p.sigma1_sq),
          std::log(p.sigma2_sq)};
}

inline ShortTermParams from_internal(std::span<const double> u, const ShortTermScales& sc = {}) {
  return ShortTermParams{u[0],           softplus(u[1]),  u[2],           u[3] / sc.temp,
                         u[4],           u[5] / sc.temp,  u[6] / sc.rain_temp, u[7],
                         u[8] / sc.depth, detail::positive_exp(u[9]), detail::positive_exp(u[10])};
}

inline std::vector<double> to_internal(const TempParams& p) {
  std::vector<double> u;
  detail::push_trend(u, p.trend);
  u.insert(u.end(), p.ar.begin(), p.ar.end());
  u.push_back(std::log(p.innovation_sd));
  return u;
}

inline TempParams from_internal(std::span<const double> u, const TempParams& shape) {
  TempParams p = shape;
  std::size_t k = 0;
  detail::pull_trend(u, k, p.trend);
  detail::pull_vector(u, k, p.ar);
  p.innovation_sd = detail::positive_exp(u[k++]);
  return p;
}

namespace detail {

/// Covariate row for a linear predictor with `m` harmonics followed by
/// arbitrary extra covariates: [sin 1..m, cos 1..m, extra...].
inline void push_fourier_row(std::vector<double>& out, int m, int day) {
  const double w = 2.0 * std::numbers::pi / kSeasonPeriod * day;
  for (int k = 1; k <= m; ++k) out.push_back(std::sin(k * w));
  for (int k = 1; k <= m; ++k) out.push_back(std::cos(k * w));
}

/// Flattened non-intercept coefficients in covariate-row order.
inline std::vector<double> linear_coefficients(const FourierTrend& t, std::span<const double> lags,
                                               std::span<const double> extra = {}) {
  std::vector<double> beta(t.a.begin(), t.a.end());
  beta.insert(beta.end(), t.b.begin(), t.b.end());
  beta.insert(beta.end(), lags.begin(), lags.end());
  beta.insert(beta.end(), extra.begin(), extra.end());
  return beta;
}

inline void push_linear(std::vector<double>& u, const Whitening& w, const FourierTrend& t, std::span<const double> lags,
                        std::span<const double> extra = {}) {
  const auto v = w.to_internal(t.a0, linear_coefficients(t, lags, extra));
  u.insert(u.end(), v.begin(), v.end());
}

inline void pull_linear(std::span<const double> u, std::size_t& k, const Whitening& w, FourierTrend& t,
                        std::vector<double>& lags, std::vector<double>* extra = nullptr) {
  std::vector<double> beta(w.dim());
  t.a0 = w.from_internal(u.subspan(k, w.dim() + 1), beta);
  k += w.dim() + 1;
  std::size_t j = 0;
  for (auto& x : t.a) x = beta[j++];
  for (auto& x : t.b) x = beta[j++];
  for (auto& x : lags) x = beta[j++];
  if (extra)
    for (auto& x : *extra) x = beta[j++];
}

}  // namespace detail

/**
 * Internal coordinates for the precipitation model: both linear predictors
 * are whitened over the design (the amount predictor over wet days only,
 * since only those enter its likelihood); the shape is on the log scale.
 */
struct PrecipCoordinates {
  Whitening amount;
  Whitening zero;

  PrecipCoordinates() = default;
  PrecipCoordinates(const PrecipDesign& d, const PrecipParams& p) {
    const PrecipOrders o = orders_of(p);
    std::vector<double> amount_rows, zero_rows, row;
    auto build = [&](int m, int q, int s, std::size_t i) {
      row.clear();
      detail::push_fourier_row(row, m, d.day[i]);
      const auto occ = d.occ_lags(i);
      row.insert(row.end(), occ.begin(), occ.begin() + q);
      const double z = p.standardize(d.temp[i]);
      double zp = 1.0;
      for (int j = 0; j < s; ++j) row.push_back(zp *= z);
    };
    std::size_t wet = 0;
    for (double r : d.precip) wet += r > 0.0 ? 1 : 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      build(o.m_zero, o.q_zero, o.s_zero, i);
      zero_rows.insert(zero_rows.end(), row.begin(), row.end());
      if (d.precip[i] > 0.0 || wet == 0) {
        build(o.m_amount, o.q_amount, o.s_amount, i);
        amount_rows.insert(amount_rows.end(), row.begin(), row.end());
      }
    }
    amount = Whitening(amount_rows, 2 * o.m_amount + o.q_amount + o.s_amount);
    zero = Whitening(zero_rows, 2 * o.m_zero + o.q_zero + o.s_zero);
  }
};

inline std::vector<double> to_internal(const PrecipParams& p, const PrecipCoordinates& c) {
  std::vector<double> u;
  detail::push_linear(u, c.amount, p.amount_trend, p.amount_occ_lags, p.amount_temp_poly);
  u.push_back(std::log(p.amount_cv_shape));
  detail::push_linear(u, c.zero, p.zero_trend, p.zero_occ_lags, p.zero_temp_poly);
  return u;
}

inline PrecipParams from_internal(std::span<const double> u, const PrecipParams& shape, const PrecipCoordinates& c) {
  PrecipParams p = shape;
  std::size_t k = 0;
  detail::pull_linear(u, k, c.amount, p.amount_trend, p.amount_occ_lags, &p.amount_temp_poly);
  p.amount_cv_shape = detail::positive_exp(u[k++]);
  detail::pull_linear(u, k, c.zero, p.zero_trend, p.zero_occ_lags, &p.zero_temp_poly);
  return p;
}

/**
 * Internal coordinates for the direct model. The log-mean predictor is
 * whitened over the snow-covered days of the design (lagged depths are
 * strongly collinear); the bare-ground slope is expressed per typical depth.
 */
struct DirectCoordinates {
  double depth_scale = 1.0;
  Whitening mean;

  DirectCoordinates() = default;
  DirectCoordinates(const DirectDesign& d, const DirectParams& p, double scale) : depth_scale(scale) {
    const int m = p.trend.order();
    const std::size_t q = p.occ_lags.size(), s = p.depth_lags.size();
    std::vector<double> rows;
    rows.reserve(d.size() * (2 * m + q + s));
    std::size_t positive = 0;
    for (double x : d.observed) positive += x > 0.0 ? 1 : 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (positive > 0 && !(d.observed[i] > 0.0)) continue;
      detail::push_fourier_row(rows, m, d.day[i]);
      const auto lags = d.depth_lags(i);
      for (std::size_t j = 0; j < q; ++j) rows.push_back(lags[j] > 0.0 ? 1.0 : 0.0);
      rows.insert(rows.end(), lags.begin(), lags.begin() + s);
    }
    mean = Whitening(rows, 2 * m + q + s);
  }
};

inline std::vector<double> to_internal(const DirectParams& p, const DirectCoordinates& c) {
  std::vector<double> u;
  detail::push_linear(u, c.mean, p.trend, p.occ_lags, p.depth_lags);
  u.push_back(p.zero_intercept);
  u.push_back(p.zero_slope * c.depth_scale);
  u.push_back(std::log(p.sigma1_sq));
  u.push_back(std::log(p.sigma2_sq));
  return u;
}

inline DirectParams from_internal(std::span<const double> u, const DirectParams& shape, const DirectCoordinates& c) {
  DirectParams p = shape;
  std::size_t k = 0;
  detail::pull_linear(u, k, c.mean, p.trend, p.occ_lags, &p.depth_lags);
  p.zero_intercept = u[k++];
  p.zero_slope = u[k++] / c.depth_scale;
  p.sigma1_sq = detail::positive_exp(u[k++]);
  p.sigma2_sq = detail::positive_exp(u[k++]);
  return p;
}

namespace detail {

template <typename Params, typename Decode>
FitResult<Params> finish_fit(const MaximizeResult& m, Decode&& decode, int free_parameters) {
  FitResult<Params> r;
  r.params = decode(m.x);
  r.log_likelihood = m.value;
  r.free_parameters = free_parameters;
  r.aic = aic(free_parameters, m.value);
  r.iterations = m.iterations;
  r.converged = m.converged;
  r.trace = m.trace;
  r.gradient = m.gradient;
  return r;
}

inline double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 1.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Short-term model

/// Starting point: 10:1 snow ratio and magnitudes typical of fitted stations.
inline ShortTermParams default_short_term_start() { return ShortTermParams{}; }

inline FitResult<ShortTermParams> fit_short_term(std::span<const ShortTermTransition> steps, const FitConfig& config,
                                                 const ShortTermParams& start = default_short_term_start()) {
  if (steps.empty()) throw std::domain_error("no usable transitions");
  const ShortTermScales scales = short_term_scales(steps);
  auto decode = [&](std::span<const double> u) { return from_internal(u, scales); };
  auto objective = [&](std::span<const double> u) { return log_likelihood(decode(u), steps); };
  const auto m = maximize(objective, to_internal(start, scales), config);
  return detail::finish_fit<ShortTermParams>(m, decode, ShortTermParams::kFreeParameters);
}

inline FitResult<ShortTermParams> fit_short_term(const Dataset& data, const FitConfig& config,
                                                 const ShortTermParams& start = default_short_term_start()) {
  const auto steps = short_term_transitions(data);
  return fit_short_term(std::span<const ShortTermTransition>(steps), config, start);
}

// ---------------------------------------------------------------------------
// Temperature

inline TempParams default_temp_start(const TempDesign& design, const TempOrders& orders) {
  std::vector<double> all;
  for (const auto& w : design.windows) all.insert(all.end(), w.temp.begin(), w.temp.end());
  TempParams p;
  p.trend = FourierTrend::constant(detail::mean_of(all), orders.m);
  p.ar.assign(orders.p, 0.0);
  p.innovation_sd = std::max(detail::sd_of(all), 1e-3);
  return p;
}

inline FitResult<TempParams> fit_temperature(const TempDesign& design, const TempOrders& orders, const FitConfig& config,
                                             std::optional<TempParams> start = std::nullopt) {
  if (design.usable_terms(orders.p) == 0) throw std::domain_error("no usable temperature window");
  const TempParams init = start ? with_orders(*start, orders) : default_temp_start(design, orders);
  auto decode = [&](std::span<const double> u) { return from_internal(u, init); };
  auto objective = [&](std::span<const double> u) { return temp_log_likelihood(decode(u), design); };
  const auto m = maximize(objective, to_internal(init), config);
  return detail::finish_fit<TempParams>(m, decode, init.free_parameters());
}

inline FitResult<TempParams> fit_temperature(const Dataset& data, const TempOrders& orders, const FitConfig& config,
                                             std::optional<TempParams> start = std::nullopt) {
  return fit_temperature(make_temp_design(data), orders, config, std::move(start));
}

// ---------------------------------------------------------------------------
// Precipitation

inline PrecipParams default_precip_start(const PrecipDesign& design, const PrecipOrders& orders) {
  std::vector<double> wet;
  for (double r : design.precip)
    if (r > 0.0) wet.push_back(r);
  PrecipParams p;
  p.temp_center = detail::mean_of(design.temp);
  p.temp_scale = std::max(detail::sd_of(design.temp), 1e-3);
  const double n = static_cast<double>(design.size());
  const double dry = (n - static_cast<double>(wet.size())) / n;
  const double clamped_dry = std::clamp(dry, 1e-3, 1.0 - 1e-3);
  double mean_wet = wet.empty() ? 1.0 : detail::mean_of(wet);
  double shape = 1.0;
  if (wet.size() >= 2) {
    const double sd = detail::sd_of(wet);
    if (sd > 0.0) shape = std::clamp(mean_wet * mean_wet / (sd * sd), 0.1, 10.0);
  }
  p.amount_trend = FourierTrend::constant(std::log(mean_wet));
  p.amount_cv_shape = shape;
  p.zero_trend = FourierTrend::constant(std::log(clamped_dry / (1.0 - clamped_dry)));
  return with_orders(p, orders);
}

inline FitResult<PrecipParams> fit_precipitation(const PrecipDesign& design, const PrecipOrders& orders,
                                                 const FitConfig& config, std::optional<PrecipParams> start = std::nullopt) {
  if (design.size() == 0) throw std::domain_error("no usable precipitation window");
  const PrecipParams init = start ? with_orders(*start, orders) : default_precip_start(design, orders);
  if (design.stride < static_cast<std::size_t>(init.max_occ_lag()))
    throw std::invalid_argument("fit_precipitation: design built for fewer lags");
  const PrecipCoordinates coords(design, init);
  auto decode = [&](std::span<const double> u) { return from_internal(u, init, coords); };
  auto objective = [&](std::span<const double> u) { return precip_log_likelihood(decode(u), design); };
  const auto m = maximize(objective, to_internal(init, coords), config);
  auto r = detail::finish_fit<PrecipParams>(m, decode, init.free_parameters());
  std::size_t wet = 0;
  for (double x : design.precip) wet += x > 0.0 ? 1 : 0;
  r.at_boundary = wet == 0 || wet == design.size();
  return r;
}

inline FitResult<PrecipParams> fit_precipitation(const Dataset& data, const PrecipOrders& orders, const FitConfig& config,
                                                 std::optional<PrecipParams> start = std::nullopt) {
  const int lag = std::max(orders.q_amount, orders.q_zero);
  return fit_precipitation(make_precip_design(data, lag), orders, config, std::move(start));
}

// ---------------------------------------------------------------------------
// Direct snow-depth model

/// Typical positive depth; the internal scale for depth coefficients.
inline double direct_depth_scale(const DirectDesign& design) {
  std::vector<double> pos;
  for (double d : design.observed)
    if (d > 0.0) pos.push_back(d);
  return pos.empty() ? 1.0 : std::max(1.0, detail::mean_of(pos));
}

inline DirectParams default_direct_start(const DirectDesign& design, const DirectOrders& orders) {
  const double typical = direct_depth_scale(design);
  DirectParams p;
  p.trend = FourierTrend::constant(std::log(typical));
  p.zero_intercept = 3.0;
  p.zero_slope = -1.0;
  p.sigma1_sq = 1.0;
  p.sigma2_sq = 1.0;
  return with_orders(p, orders);
}

inline FitResult<DirectParams> fit_direct(const DirectDesign& design, const DirectOrders& orders, const FitConfig& config,
                                          std::optional<DirectParams> start = std::nullopt) {
  if (design.size() == 0) throw std::domain_error("no usable snow depth window");
  DirectParams init = start ? with_orders(*start, orders) : default_direct_start(design, orders);
  if (design.stride < static_cast<std::size_t>(init.max_lag()))
    throw std::invalid_argument("fit_direct: design built for fewer lags");
  init.depth_cap = std::numeric_limits<double>::infinity();
  const DirectCoordinates coords(design, init, direct_depth_scale(design));
  auto decode = [&](std::span<const double> u) { return from_internal(u, init, coords); };
  auto objective = [&](std::span<const double> u) { return direct_log_likelihood(decode(u), design); };
  const auto m = maximize(objective, to_internal(init, coords), config);
  auto result = detail::finish_fit<DirectParams>(m, decode, init.free_parameters());
  double deepest = 0.0;
  for (double x : design.observed) deepest = std::max(deepest, x);
  for (double x : design.depth) deepest = std::max(deepest, x);
  if (deepest > 0.0) result.params.depth_cap = deepest;
  return result;
}

inline FitResult<DirectParams> fit_direct(const Dataset& data, const DirectOrders& orders, const FitConfig& config,
                                          std::optional<DirectParams> start = std::nullopt) {
  return fit_direct(make_direct_design(data, std::max(orders.q, orders.s)), orders, config, std::move(start));
}

// ---------------------------------------------------------------------------
// Stepwise order selection

/**
 * Forward stepwise search. Starting from all-zero orders, cycle through the
 * order dimensions in turn, trying to raise each by one; keep the increment
 * only if AIC drops by more than 1e-9. Stops after a cycle with no accepted
 * increment. Candidate fits are warm-started from the current best.
 */
template <typename Params, typename FitFn>
std::pair<std::vector<int>, FitResult<Params>> stepwise_search(const std::vector<int>& max_orders, FitFn&& fit) {
  constexpr double kMinImprovement = 1e-9;
  std::vector<int> orders(max_orders.size(), 0);
  FitResult<Params> best = fit(orders, std::optional<Params>{});
  for (;;) {
    bool improved = false;
    for (std::size_t d = 0; d < orders.size(); ++d) {
      if (orders[d] >= max_orders[d]) continue;
      auto candidate = orders;
      ++candidate[d];
      auto r = fit(candidate, std::optional<Params>{best.params});
      if (r.aic < best.aic - kMinImprovement) {
        best = std::move(r);
        orders = std::move(candidate);
        improved = true;
      }
    }
    if (!improved) break;
  }
  return {orders, std::move(best)};
}

inline std::pair<TempOrders, FitResult<TempParams>> stepwise_select_temperature(const Dataset& data, const TempOrders& max_orders,
                                                                                const FitConfig& config) {
  const TempDesign design = make_temp_design(data, max_orders.p);
  auto [o, r] = stepwise_search<TempParams>(max_orders.flat(), [&](const std::vector<int>& v, std::optional<TempParams> s) {
    return fit_temperature(design, TempOrders::from_flat(v), config, std::move(s));
  });
  return {TempOrders::from_flat(o), std::move(r)};
}

inline std::pair<PrecipOrders, FitResult<PrecipParams>> stepwise_select_precipitation(const Dataset& data,
                                                                                      const PrecipOrders& max_orders,
                                                                                      const FitConfig& config) {
  const PrecipDesign design = make_precip_design(data, std::max(max_orders.q_amount, max_orders.q_zero));
  auto [o, r] = stepwise_search<PrecipParams>(max_orders.flat(), [&](const std::vector<int>& v, std::optional<PrecipParams> s) {
    return fit_precipitation(design, PrecipOrders::from_flat(v), config, std::move(s));
  });
  return {PrecipOrders::from_flat(o), std::move(r)};
}

inline std::pair<DirectOrders, FitResult<DirectParams>> stepwise_select_direct(const Dataset& data, const DirectOrders& max_orders,
                                                                               const FitConfig& config) {
  const DirectDesign design = make_direct_design(data, std::max(max_orders.q, max_orders.s));
  auto [o, r] = stepwise_search<DirectParams>(max_orders.flat(), [&](const std::vector<int>& v, std::optional<DirectParams> s) {
    return fit_direct(design, DirectOrders::from_flat(v), config, std::move(s));
  });
  return {DirectOrders::from_flat(o), std::move(r)};
}

}  // namespace snowcast
