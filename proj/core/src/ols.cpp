#include "leanreg/ols.hpp"

#include <string>

#include "leanreg/error.hpp"

namespace leanreg {

void validate(const Dataset& data) {
  if (data.n() == 0 || data.p() == 0) {
    throw Error(ErrorCode::empty_data, "dataset has no observations or no covariates");
  }
  if (data.y.size() != data.n()) {
    throw Error(ErrorCode::dimension_mismatch,
                "response length " + std::to_string(data.y.size()) + " does not match " +
                    std::to_string(data.n()) + " rows");
  }
  if (!data.x.all_finite() || !data.y.all_finite()) {
    throw Error(ErrorCode::invalid_argument, "dataset contains non-finite values");
  }
}

OlsFit fit_ols(const Dataset& data) {
  validate(data);
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const double inv_n = 1.0 / static_cast<double>(n);

  Mat sigma(p, p);
  Vec gamma(p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.x.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      gamma[j] += xi[j] * data.y[i];
      for (std::size_t k = 0; k <= j; ++k) sigma(j, k) += xi[j] * xi[k];
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    gamma[j] *= inv_n;
    for (std::size_t k = 0; k <= j; ++k) {
      sigma(j, k) *= inv_n;
      sigma(k, j) = sigma(j, k);
    }
  }

  Vec beta;
  try {
    beta = solve_spd(sigma, gamma);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::not_positive_definite) {
      throw Error(ErrorCode::singular_design, std::string("design is singular: ") + e.what());
    }
    throw;
  }

  OlsFit fit;
  fit.n = n;
  fit.p = p;
  fit.residuals = Vec(n);
  fit.scores_hat = Mat(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.x.row(i);
    const double e = data.y[i] - dot(xi, beta.span());
    fit.residuals[i] = e;
    for (std::size_t j = 0; j < p; ++j) fit.scores_hat(i, j) = xi[j] * e;
  }
  fit.beta_hat = std::move(beta);
  fit.sigma_hat = std::move(sigma);
  fit.gamma_hat = std::move(gamma);
  return fit;
}

Mat scores_at(const Dataset& data, const Vec& beta) {
  validate(data);
  if (beta.size() != data.p()) {
    throw Error(ErrorCode::dimension_mismatch, "scores_at: beta length does not match p");
  }
  Mat s(data.n(), data.p());
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto xi = data.x.row(i);
    const double e = data.y[i] - dot(xi, beta.span());
    for (std::size_t j = 0; j < data.p(); ++j) s(i, j) = xi[j] * e;
  }
  return s;
}

Vec target_from_moments(const Mat& sigma, const Vec& gamma) { return solve_spd(sigma, gamma); }

double mean_squared_loss(const Dataset& data, const Vec& beta) {
  validate(data);
  if (beta.size() != data.p()) {
    throw Error(ErrorCode::dimension_mismatch, "mean_squared_loss: beta length does not match p");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double e = data.y[i] - dot(data.x.row(i), beta.span());
    s += e * e;
  }
  return s / static_cast<double>(data.n());
}

}  // namespace leanreg
