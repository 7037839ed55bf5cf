#pragma once

// Seasonal Fourier trend with a fixed 366-day period, plus a small lag
// buffer used by every autoregressive-style model.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "snowcast/dataset.hpp"

namespace snowcast {

inline constexpr double kSeasonPeriod = 366.0;

struct FourierTrend {
  double a0 = 0.0;
  std::vector<double> a;  ///< sine coefficients, k = 1..order
  std::vector<double> b;  ///< cosine coefficients

  static FourierTrend constant(double a0, int order = 0) {
    return FourierTrend{a0, std::vector<double>(order, 0.0), std::vector<double>(order, 0.0)};
  }

  int order() const { return static_cast<int>(a.size()); }

  void validate() const {
    if (a.size() != b.size()) throw std::invalid_argument("FourierTrend: a and b lengths differ");
  }

  /// Grow or shrink to `m` harmonics; new coefficients are zero.
  void resize(int m) {
    a.resize(m, 0.0);
    b.resize(m, 0.0);
  }

  int free_parameters() const { return 1 + 2 * order(); }
};

/// Trend at fractional season day `s`; periodic in s with period 366.
inline double fourier_eval_at(const FourierTrend& trend, double s) {
  const double w = 2.0 * std::numbers::pi / kSeasonPeriod * s;
  double h = trend.a0;
  for (int k = 1; k <= trend.order(); ++k) {
    h += trend.a[k - 1] * std::sin(k * w) + trend.b[k - 1] * std::cos(k * w);
  }
  return h;
}

inline double fourier_eval(const FourierTrend& trend, SeasonDay s) {
  return fourier_eval_at(trend, static_cast<double>(s.value));
}

/// Trend values for season days 1..366, indexed by day (slot 0 unused).
using TrendTable = std::array<double, 367>;

inline TrendTable trend_table(const FourierTrend& trend) {
  TrendTable out{};
  for (int s = 1; s <= 366; ++s) out[s] = fourier_eval_at(trend, s);
  return out;
}

/**
 * Most-recent-first buffer of lagged values: lag(1) is yesterday. A
 * zero-capacity buffer ignores pushes.
 */
class LagHistory {
 public:
  LagHistory() = default;
  explicit LagHistory(std::size_t capacity, double fill = 0.0) : values_(capacity, fill) {}

  /// Build from a chronological series (oldest first), keeping the last
  /// `capacity` values.
  static LagHistory from_chronological(std::span<const double> series, std::size_t capacity) {
    if (series.size() < capacity) throw std::domain_error("LagHistory: insufficient history");
    LagHistory h(capacity);
    for (std::size_t j = 0; j < capacity; ++j) h.values_[j] = series[series.size() - 1 - j];
    return h;
  }

  std::size_t size() const { return values_.size(); }
  double lag(std::size_t j) const { return values_[j - 1]; }
  std::span<const double> lags() const { return values_; }

  void push(double v) {
    if (values_.empty()) return;
    std::shift_right(values_.begin(), values_.end(), 1);
    values_[0] = v;
  }

 private:
  std::vector<double> values_;
};

/// sum_j coef[j] * lags[j], with lags most-recent-first.
inline double lag_dot(std::span<const double> coef, std::span<const double> lags) {
  double s = 0.0;
  for (std::size_t j = 0; j < coef.size(); ++j) s += coef[j] * lags[j];
  return s;
}

}  // namespace snowcast
