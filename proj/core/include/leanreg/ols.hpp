#pragma once

#include <cstddef>

#include "leanreg/linalg.hpp"

namespace leanreg {

/// n observations of a p-vector of covariates (rows of x) and a response.
/// Random and fixed designs share this type; no intercept is ever implied.
struct Dataset {
  Mat x;
  Vec y;

  std::size_t n() const noexcept { return x.rows(); }
  std::size_t p() const noexcept { return x.cols(); }
};

/// Throws dimension_mismatch, empty_data, or invalid_argument (non-finite).
void validate(const Dataset& data);

struct OlsFit {
  Vec beta_hat;
  Mat sigma_hat;   // n^-1 sum x_i x_i'
  Vec gamma_hat;   // n^-1 sum x_i y_i
  Vec residuals;   // y_i - x_i' beta_hat
  Mat scores_hat;  // row i: x_i * residual_i
  std::size_t n = 0;
  std::size_t p = 0;
};

/// Least squares in the two-average form beta_hat = sigma_hat^-1 gamma_hat.
/// Requires sigma_hat positive definite (so n >= p); otherwise singular_design.
OlsFit fit_ols(const Dataset& data);

/// Row i: x_i (y_i - x_i' beta). No centering.
Mat scores_at(const Dataset& data, const Vec& beta);

/// beta = sigma^-1 gamma, the minimizer of the averaged expected squared loss.
Vec target_from_moments(const Mat& sigma, const Vec& gamma);

/// n^-1 sum (y_i - x_i' beta)^2.
double mean_squared_loss(const Dataset& data, const Vec& beta);

}  // namespace leanreg
