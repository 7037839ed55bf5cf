#pragma once

/** @file
 * Zero-inflated gamma distribution: a point mass at zero mixed with a gamma
 * distribution on the positive axis. Used for both snow depth and
 * precipitation.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "snowcast/random.hpp"

namespace snowcast {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Gamma distribution with shape k and scale theta (mean k*theta).
struct GammaSpec {
  double shape = 1.0;
  double scale = 1.0;

  double mean() const { return shape * scale; }
  double variance() const { return shape * scale * scale; }
};

struct ZeroInflatedSpec {
  double p_zero = 0.0;
  GammaSpec positive_part;

  /// Unconditional mean (1 - p_zero) * E[positive part].
  double mean() const { return (1.0 - p_zero) * positive_part.mean(); }
};

/// Shape/scale matching the given first two moments.
inline GammaSpec gamma_from_moments(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0) || !std::isfinite(mean) || !std::isfinite(variance))
    throw std::domain_error("gamma_from_moments: mean and variance must be positive");
  // (mean / variance) * mean avoids underflow of mean^2 for tiny means.
  return GammaSpec{(mean / variance) * mean, variance / mean};
}

/// Logistic function, evaluated through exp(-|x|) so it never overflows.
inline double inverse_logit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

/// Inverse of softplus for y > 0.
inline double softplus_inverse(double y) {
  if (!(y > 0.0)) throw std::domain_error("softplus_inverse: argument must be positive");
  return y + std::log(-std::expm1(-y));
}

inline double log_inverse_logit(double x) { return -softplus(-x); }
inline double log1m_inverse_logit(double x) { return -softplus(x); }

/// log Gamma(x) for x > 0 without touching the global signgam.
inline double log_gamma_fn(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

/**
 * Regularized lower incomplete gamma P(a, x). Series expansion for
 * x < a + 1, modified Lentz continued fraction for the upper tail
 * otherwise. Absolute accuracy is near machine precision for the shapes
 * that arise here.
 */
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("regularized_gamma_p: shape must be positive");
  if (x < 0.0) throw std::domain_error("regularized_gamma_p: negative argument");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_prefactor = a * std::log(x) - x - log_gamma_fn(a);
  constexpr double eps = 1e-16;
  constexpr int max_iter = 1'000'000;
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < max_iter; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * eps) break;
    }
    return std::min(1.0, sum * std::exp(log_prefactor));
  }
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < max_iter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return std::max(0.0, 1.0 - std::exp(log_prefactor) * h);
}

inline double gamma_log_density(const GammaSpec& g, double x) {
  return (g.shape - 1.0) * std::log(x) - x / g.scale - log_gamma_fn(g.shape) -
         g.shape * std::log(g.scale);
}

inline double gamma_cdf(const GammaSpec& g, double x) {
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(g.shape, x / g.scale);
}

/// Log of the mixed density: log p_zero at 0, log(1-p_zero) + log g(x) above.
inline double zig_log_density(const ZeroInflatedSpec& spec, double x) {
  if (!(x >= 0.0)) throw std::domain_error("zig_log_density: negative observation");
  if (x == 0.0) return spec.p_zero > 0.0 ? std::log(spec.p_zero) : kNegInf;
  if (spec.p_zero >= 1.0) return kNegInf;
  return std::log1p(-spec.p_zero) + gamma_log_density(spec.positive_part, x);
}

/// Same as zig_log_density with p_zero given on the logit scale, which keeps
/// both log p_zero and log(1 - p_zero) accurate in the tails.
inline double zig_log_density_logit(double zero_logit, const GammaSpec& g, double x) {
  if (x == 0.0) return log_inverse_logit(zero_logit);
  return log1m_inverse_logit(zero_logit) + gamma_log_density(g, x);
}

inline double zig_cdf(const ZeroInflatedSpec& spec, double x) {
  if (!(x >= 0.0)) throw std::domain_error("zig_cdf: negative argument");
  if (x == 0.0) return spec.p_zero;
  return spec.p_zero + (1.0 - spec.p_zero) * gamma_cdf(spec.positive_part, x);
}

/// Draw from Gamma(shape, scale). Never returns exactly zero; values below
/// the smallest normal double are clamped up to it.
inline double gamma_sample(const GammaSpec& g, RandomStream& rng) {
  const double log_value = rng.log_gamma_unit(g.shape) + std::log(g.scale);
  return std::max(std::exp(log_value), std::numeric_limits<double>::min());
}

/// Zero with probability p_zero, otherwise a gamma draw.
inline double zig_sample(const ZeroInflatedSpec& spec, RandomStream& rng) {
  if (rng.uniform() < spec.p_zero) return 0.0;
  return gamma_sample(spec.positive_part, rng);
}

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace snowcast
