#pragma once

/** @file
 * One-day-ahead snow depth given today's depth and the next 24 hours of
 * temperature and precipitation.
 *
 * The positive part is gamma with identity-linked mean
 *
 *     E = exp(mu) + R beta0 s(beta1 + beta2 T) + D_prev s(beta3 + (beta4 + beta5 R) T)
 *
 * (s the logistic function), variance sigma1^2 + sigma2^2 (E - D_prev)^2, and
 * the probability of bare ground is s(beta6 + beta7 E).
 */

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "snowcast/dataset.hpp"
#include "snowcast/zig.hpp"

namespace snowcast {

struct ShortTermParams {
  double mu = -5.0;
  double beta0 = 10.0;  ///< cm snow per mm water
  double beta1 = 1.0;
  double beta2 = -1.0;
  double beta3 = 2.0;
  double beta4 = 0.0;
  double beta5 = 0.0;
  double beta6 = 3.0;
  double beta7 = -1.0;
  double sigma1_sq = 1.0;  ///< cm^2
  double sigma2_sq = 1.0;

  static constexpr int kFreeParameters = 11;

  void validate() const {
    if (!(beta0 >= 0.0)) throw std::invalid_argument("ShortTermParams: beta0 must be nonnegative");
    if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0))
      throw std::invalid_argument("ShortTermParams: variance coefficients must be positive");
  }
};

/// Oslo (Blindern) estimates; used for synthetic data and tests.
inline constexpr ShortTermParams kOsloShortTerm{-6.92, 0.96, 0.88, -1.76, 1.99, -0.30,
                                                -0.03, 4.13, -1.97, 0.63, 1.79};

struct DayInputs {
  double temp = 0.0;        ///< deg C over the last 24 h
  double precip = 0.0;      ///< mm over the last 24 h
  double prev_depth = 0.0;  ///< cm, yesterday
};

/// Floor applied to the gamma mean before moment matching.
inline constexpr double kMinGammaMean = 1e-12;

inline double snowfall_term(const ShortTermParams& p, double temp, double precip) {
  return precip * p.beta0 * inverse_logit(p.beta1 + p.beta2 * temp);
}

/// Depth surviving from yesterday.
inline double retention_term(const ShortTermParams& p, double temp, double precip, double prev_depth) {
  return prev_depth * inverse_logit(p.beta3 + (p.beta4 + p.beta5 * precip) * temp);
}

inline double conditional_mean(const ShortTermParams& p, const DayInputs& in) {
  return std::exp(p.mu) + snowfall_term(p, in.temp, in.precip) +
         retention_term(p, in.temp, in.precip, in.prev_depth);
}

inline double conditional_variance(const ShortTermParams& p, const DayInputs& in) {
  const double change = conditional_mean(p, in) - in.prev_depth;
  return p.sigma1_sq + p.sigma2_sq * change * change;
}

inline double zero_probability(const ShortTermParams& p, const DayInputs& in) {
  return inverse_logit(p.beta6 + p.beta7 * conditional_mean(p, in));
}

inline ZeroInflatedSpec transition_spec(const ShortTermParams& p, const DayInputs& in) {
  const double mean = conditional_mean(p, in);
  const double change = mean - in.prev_depth;
  const double variance = p.sigma1_sq + p.sigma2_sq * change * change;
  return ZeroInflatedSpec{inverse_logit(p.beta6 + p.beta7 * mean),
                          gamma_from_moments(std::max(mean, kMinGammaMean), variance)};
}

/// One usable day-to-day step of the observed series.
struct ShortTermTransition {
  DayInputs inputs;
  double observed = 0.0;  ///< depth at the end of the step
  std::size_t index = 0;  ///< dataset index of the observed day
};

/// Every t with depth at t-1 and t, temperature and precipitation at t.
inline std::vector<ShortTermTransition> short_term_transitions(const Dataset& data) {
  std::vector<ShortTermTransition> out;
  for (std::size_t t = 1; t < data.size(); ++t) {
    const auto& prev = data[t - 1];
    const auto& cur = data[t];
    if (!prev.snow_depth || !has_fields(cur, kTemperature | kPrecipitation | kSnowDepth)) continue;
    out.push_back({{*cur.temperature, *cur.precipitation, *prev.snow_depth}, *cur.snow_depth, t});
  }
  return out;
}

/// Log density of one transition; NaN or -inf for parameters outside the
/// model's domain, never throws.
inline double transition_log_density(const ShortTermParams& p, const DayInputs& in, double observed) {
  const double mean = conditional_mean(p, in);
  const double change = mean - in.prev_depth;
  const double variance = p.sigma1_sq + p.sigma2_sq * change * change;
  const double m = std::max(mean, kMinGammaMean);
  const GammaSpec g{(m / variance) * m, variance / m};
  return zig_log_density_logit(p.beta6 + p.beta7 * mean, g, observed);
}

/// Sequential sum so results are bit-reproducible.
inline double log_likelihood(const ShortTermParams& p, std::span<const ShortTermTransition> steps) {
  if (steps.empty()) throw std::domain_error("no usable transitions");
  double total = 0.0;
  for (const auto& s : steps) total += transition_log_density(p, s.inputs, s.observed);
  return total;
}

inline double log_likelihood(const ShortTermParams& p, const Dataset& data) {
  return log_likelihood(p, short_term_transitions(data));
}

}  // namespace snowcast
