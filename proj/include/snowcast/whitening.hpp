#pragma once

// Affine reparameterization of a linear predictor  c + x'beta  in which the
// covariates are centred and decorrelated:
//
//   c + x'beta = u0 + z'u,   z = L^{-1} (x - mean),   Sigma = L L'
//
// Fitting in (u0, u) removes the collinearity between lagged covariates
// that otherwise dominates the conditioning of the likelihood.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace snowcast {

class Whitening {
 public:
  Whitening() = default;

  /// Estimate from `rows` covariate vectors of length `dim` stored contiguously.
  Whitening(std::span<const double> rows, std::size_t dim) : dim_(dim), mean_(dim, 0.0), chol_(dim * dim, 0.0) {
    if (dim == 0) return;
    const std::size_t n = rows.size() / dim;
    if (n == 0) {
      for (std::size_t i = 0; i < dim; ++i) chol_[i * dim + i] = 1.0;
      return;
    }
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < dim; ++i) mean_[i] += rows[r * dim + i];
    for (auto& m : mean_) m /= static_cast<double>(n);
    std::vector<double> cov(dim * dim, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < dim; ++i) {
        const double di = rows[r * dim + i] - mean_[i];
        for (std::size_t j = 0; j <= i; ++j) cov[i * dim + j] += di * (rows[r * dim + j] - mean_[j]);
      }
    double trace = 0.0;
    for (std::size_t i = 0; i < dim; ++i) trace += cov[i * dim + i] / static_cast<double>(n);
    const double ridge = 1e-10 * std::max(trace / static_cast<double>(dim), 1e-300) + 1e-300;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s = cov[i * dim + j] / static_cast<double>(n) + (i == j ? ridge : 0.0);
        for (std::size_t k = 0; k < j; ++k) s -= chol_[i * dim + k] * chol_[j * dim + k];
        if (i == j) {
          // Degenerate covariates (constant columns) keep unit scale.
          chol_[i * dim + i] = s > ridge ? std::sqrt(s) : 1.0;
        } else {
          chol_[i * dim + j] = s / chol_[j * dim + j];
        }
      }
  }

  std::size_t dim() const { return dim_; }

  /// (intercept, beta) -> (u0, u)
  std::vector<double> to_internal(double intercept, std::span<const double> beta) const {
    check(beta.size());
    std::vector<double> u(dim_ + 1, 0.0);
    u[0] = intercept;
    for (std::size_t i = 0; i < dim_; ++i) {
      u[0] += mean_[i] * beta[i];
      double s = 0.0;
      for (std::size_t k = i; k < dim_; ++k) s += chol_[k * dim_ + i] * beta[k];  // (L' beta)_i
      u[i + 1] = s;
    }
    return u;
  }

  /// (u0, u) -> intercept; beta written to `beta`.
  double from_internal(std::span<const double> u, std::span<double> beta) const {
    check(beta.size());
    for (std::size_t ii = dim_; ii-- > 0;) {
      double s = u[ii + 1];
      for (std::size_t k = ii + 1; k < dim_; ++k) s -= chol_[k * dim_ + ii] * beta[k];
      beta[ii] = s / chol_[ii * dim_ + ii];
    }
    double intercept = u[0];
    for (std::size_t i = 0; i < dim_; ++i) intercept -= mean_[i] * beta[i];
    return intercept;
  }

 private:
  void check(std::size_t n) const {
    if (n != dim_) throw std::invalid_argument("Whitening: dimension mismatch");
  }

  std::size_t dim_ = 0;
  std::vector<double> mean_;
  std::vector<double> chol_;  ///< lower triangular, row-major
};

}  // namespace snowcast
