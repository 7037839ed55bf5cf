#pragma once

/** @file
 * First-order maximizer for the library's likelihoods.
 *
 * Steepest ascent along central finite-difference gradients, with each
 * coordinate rescaled by a diagonal curvature estimate (refreshed every
 * hundred iterations) so that parameters on very different scales move at
 * comparable rates. Trial step lengths come from the Barzilai-Borwein rule
 * in the rescaled coordinates and are backtracked until the Armijo
 * sufficient-increase condition holds, so every accepted iterate improves
 * the objective.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace snowcast {

struct FitConfig {
  int max_iterations = 5000;
  double gradient_step = 1e-5;        ///< relative finite-difference step
  double initial_learning_rate = 1e-2;
  double convergence_tol = 1e-9;      ///< relative objective change
  double backtrack_factor = 0.5;

  void validate() const {
    if (max_iterations < 0 || !(gradient_step > 0.0) || !(initial_learning_rate > 0.0) ||
        !(convergence_tol > 0.0) || !(backtrack_factor > 0.0 && backtrack_factor < 1.0))
      throw std::invalid_argument("FitConfig: invalid settings");
  }
};

using Objective = std::function<double(std::span<const double>)>;

struct MaximizeResult {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> gradient;  ///< finite-difference gradient at x
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  ///< objective at the start and after each accepted step
};

namespace detail {

inline double finite_or_neg_inf(double v) {
  return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Central differences with step h * max(1, |x_i|).
inline std::vector<double> finite_difference_gradient(const Objective& f, std::span<const double> x, double h,
                                                      double f_at_x) {
  std::vector<double> g(x.size(), 0.0);
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double up = detail::finite_or_neg_inf(f(probe));
    probe[i] = x[i] - step;
    const double down = detail::finite_or_neg_inf(f(probe));
    probe[i] = x[i];
    const bool up_ok = std::isfinite(up);
    const bool down_ok = std::isfinite(down);
    if (up_ok && down_ok) g[i] = (up - down) / (2.0 * step);
    else if (up_ok) g[i] = (up - f_at_x) / step;
    else if (down_ok) g[i] = (f_at_x - down) / step;
  }
  return g;
}

/// Per-coordinate squared scale 1 / |d2f/dx_i^2|, from second differences
/// with a coarse step. Degenerate curvatures fall back to the median.
inline std::vector<double> diagonal_scaling(const Objective& f, std::span<const double> x, double f_at_x) {
  const std::size_t n = x.size();
  std::vector<double> curvature(n, 0.0);
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double step = 1e-3 * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double up = detail::finite_or_neg_inf(f(probe));
    probe[i] = x[i] - step;
    const double down = detail::finite_or_neg_inf(f(probe));
    probe[i] = x[i];
    const double c = std::abs(up - 2.0 * f_at_x + down) / (step * step);
    curvature[i] = std::isfinite(c) ? c : 0.0;
  }
  std::vector<double> positive;
  for (double c : curvature)
    if (c > 0.0) positive.push_back(c);
  if (positive.empty()) return std::vector<double>(n, 1.0);
  std::nth_element(positive.begin(), positive.begin() + positive.size() / 2, positive.end());
  const double median = positive[positive.size() / 2];
  std::vector<double> scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = curvature[i] > 1e-8 * median ? curvature[i] : median;
    scale[i] = 1.0 / c;
  }
  return scale;
}

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// True when the gradient is small relative to the objective's magnitude.
inline bool gradient_converged(std::span<const double> g, double value, double tol) {
  return inf_norm(g) <= 10.0 * tol * std::abs(value);
}

inline MaximizeResult maximize(const Objective& objective, std::vector<double> initial, const FitConfig& config) {
  config.validate();
  auto f = [&](std::span<const double> x) { return detail::finite_or_neg_inf(objective(x)); };

  MaximizeResult r;
  r.x = std::move(initial);
  r.value = f(r.x);
  if (!std::isfinite(r.value)) throw std::domain_error("maximize: objective not finite at initial point");
  r.trace.push_back(r.value);
  r.gradient = finite_difference_gradient(f, r.x, config.gradient_step, r.value);

  constexpr double armijo = 1e-4;
  constexpr int max_backtracks = 60;
  constexpr int stall_limit = 20;
  constexpr int rescale_every = 100;
  const std::size_t n = r.x.size();

  std::vector<double> scale = diagonal_scaling(f, r.x, r.value);
  std::vector<double> direction(n);
  auto set_direction = [&] {
    for (std::size_t i = 0; i < n; ++i) direction[i] = scale[i] * r.gradient[i];
  };
  set_direction();
  double step = config.initial_learning_rate / std::max(inf_norm(direction), 1e-300);
  int stalled = 0;
  int last_rescale = 0;
  std::vector<double> trial(n);

  while (r.iterations < config.max_iterations) {
    if (gradient_converged(r.gradient, r.value, config.convergence_tol) || inf_norm(r.gradient) == 0.0) {
      r.converged = true;
      break;
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += r.gradient[i] * direction[i];

    bool accepted = false;
    double trial_value = 0.0;
    for (int k = 0; k < max_backtracks; ++k) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = r.x[i] + step * direction[i];
      trial_value = f(trial);
      if (trial_value >= r.value + armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= config.backtrack_factor;
    }
    if (!accepted) break;

    ++r.iterations;
    auto g_new = finite_difference_gradient(f, trial, config.gradient_step, trial_value);
    // Barzilai-Borwein length in the rescaled coordinates, written for ascent.
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = trial[i] - r.x[i];
      ss += s * s / scale[i];
      sy -= s * (g_new[i] - r.gradient[i]);
    }
    const double previous_step = step;
    step = sy > 0.0 ? ss / sy : previous_step * 4.0;
    step = std::clamp(step, 1e-20, 1e20);

    const double change = trial_value - r.value;
    r.x.swap(trial);
    r.value = trial_value;
    r.gradient = std::move(g_new);
    r.trace.push_back(r.value);
    stalled = change <= config.convergence_tol * std::max(1.0, std::abs(r.value)) ? stalled + 1 : 0;
    bool refresh = r.iterations - last_rescale >= rescale_every;
    if (stalled >= stall_limit) {
      // Stalling soon after a curvature refresh ends the run; otherwise
      // refresh and keep going.
      if (r.iterations - last_rescale <= stall_limit) break;
      refresh = true;
      stalled = 0;
    }
    if (refresh) {
      scale = diagonal_scaling(f, r.x, r.value);
      step = 1.0;
      last_rescale = r.iterations;
    }
    set_direction();
  }
  if (!r.converged) r.converged = gradient_converged(r.gradient, r.value, config.convergence_tol);
  return r;
}

}  // namespace snowcast
