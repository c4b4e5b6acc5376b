#pragma once

// Checks that need population quantities and therefore only make sense when
// the data-generating process is known (simulation, or the `check` command).

#include "leanreg/linalg.hpp"
#include "leanreg/ols.hpp"

namespace leanreg {

/// Comparing two sides of a true inequality in floating point:
/// lhs <= rhs + kInequalitySlack * (1 + |lhs| + |rhs|).
inline constexpr double kInequalitySlack = 1e-9;

/// Quantities behind the deterministic OLS perturbation bound. With
/// lin = sigma^-1 (gamma_hat - sigma_hat beta): whenever
/// ||sigma_hat - sigma||_op <= lambda_min(sigma) / 2,
///   lin / 2 <= ||beta_hat - beta|| <= 2 lin, and
///   ||beta_hat - beta - lin_vector|| <= 2 D lin / lambda_min(sigma).
/// No distributional assumption is involved.
struct DetCheckReport {
  double lambda_n = 0.0;
  double d2n = 0.0;
  bool precondition_holds = false;
  double err_norm = 0.0;
  double lin_term_norm = 0.0;
  double remainder_norm = 0.0;
  bool sandwich_ok = false;
  bool remainder_ok = false;
};

DetCheckReport det_inequality_check(const Mat& sigma_hat, const Vec& gamma_hat,
                                    const Mat& sigma_pop, const Vec& gamma_pop);

/// || sqrt(n)(beta_hat - beta) - n^-1/2 sum_i sigma^-1 (raw_i - mean_i) ||_2,
/// the remainder of the linear (efficient influence function) representation.
/// raw_scores rows are x_i (y_i - x_i' beta); an empty score_means is zero.
double linear_representation_remainder(const OlsFit& fit, const Mat& sigma_pop,
                                       const Vec& beta_pop, const Mat& raw_scores,
                                       const Mat& score_means);

/// Same, with raw scores evaluated from the data at beta_pop.
double influence_remainder(const Dataset& data, const OlsFit& fit, const Mat& sigma_pop,
                           const Vec& beta_pop, const Mat& score_means);

}  // namespace leanreg
