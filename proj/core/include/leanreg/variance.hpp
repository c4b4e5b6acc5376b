#pragma once

#include <string_view>

#include "leanreg/linalg.hpp"
#include "leanreg/ols.hpp"

namespace leanreg {

enum class VarianceMethod { classical, sandwich_hc0, sandwich_hc1 };

std::string_view to_string(VarianceMethod m) noexcept;

/// Estimate of the covariance of sqrt(n) (beta_hat - beta_n).
struct VarianceEstimate {
  VarianceMethod method = VarianceMethod::sandwich_hc0;
  Mat avar;
  Vec se;    // sqrt(avar(j,j) / n)
  Mat meat;  // k_check for the sandwich methods; sigma2_hat * sigma_hat for classical
};

/// n^-1 sum x_i x_i' e_i^2.
///
/// Under independent but non-identically distributed sampling this converges
/// to the uncentered score second moment K*, which dominates the true score
/// covariance K in the Loewner order. K itself has no consistent estimator in
/// that setting, so the library only ever exposes this conservative version.
Mat k_check(const OlsFit& fit);

/// sigma_hat^-1 k_check sigma_hat^-1, times n / (n - p) when dof_correct (HC1).
/// Throws singular_design, or degenerate_dof for HC1 with n <= p.
VarianceEstimate sandwich_avar(const OlsFit& fit, bool dof_correct = false);

/// The homoscedastic comparator sigma2_hat * sigma_hat^-1 with
/// sigma2_hat = sum e_i^2 / (n - p). Valid only under a correctly specified
/// linear model with constant error variance. Throws degenerate_dof (n <= p).
VarianceEstimate classical_avar(const OlsFit& fit);

}  // namespace leanreg
