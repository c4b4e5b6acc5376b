#include "leanreg/diagnostics.hpp"

#include <cmath>

#include "leanreg/error.hpp"

namespace leanreg {
namespace {

bool leq_with_slack(double lhs, double rhs) {
  return lhs <= rhs + kInequalitySlack * (1.0 + std::abs(lhs) + std::abs(rhs));
}

}  // namespace

DetCheckReport det_inequality_check(const Mat& sigma_hat, const Vec& gamma_hat,
                                    const Mat& sigma_pop, const Vec& gamma_pop) {
  const std::size_t p = sigma_pop.rows();
  if (sigma_hat.rows() != p || sigma_hat.cols() != p || gamma_hat.size() != p ||
      gamma_pop.size() != p) {
    throw Error(ErrorCode::dimension_mismatch, "det_inequality_check: inconsistent dimensions");
  }
  const Vec beta_hat = solve_spd(sigma_hat, gamma_hat);
  const Vec beta = solve_spd(sigma_pop, gamma_pop);

  DetCheckReport r;
  r.lambda_n = eig_sym_extremes(sigma_pop).lambda_min;
  r.d2n = op_norm(sigma_hat - sigma_pop);
  r.precondition_holds = r.d2n <= r.lambda_n / 2.0;

  const Vec err = beta_hat - beta;
  const Vec lin = solve_spd(sigma_pop, gamma_hat - sigma_hat * beta);
  r.err_norm = norm2(err);
  r.lin_term_norm = norm2(lin);
  r.remainder_norm = norm2(err - lin);

  r.sandwich_ok = leq_with_slack(0.5 * r.lin_term_norm, r.err_norm) &&
                  leq_with_slack(r.err_norm, 2.0 * r.lin_term_norm);
  r.remainder_ok =
      leq_with_slack(r.remainder_norm, 2.0 * r.d2n * r.lin_term_norm / r.lambda_n);
  return r;
}

double linear_representation_remainder(const OlsFit& fit, const Mat& sigma_pop,
                                       const Vec& beta_pop, const Mat& raw_scores,
                                       const Mat& score_means) {
  const std::size_t n = fit.n;
  const std::size_t p = fit.p;
  if (sigma_pop.rows() != p || sigma_pop.cols() != p || beta_pop.size() != p ||
      raw_scores.rows() != n || raw_scores.cols() != p) {
    throw Error(ErrorCode::dimension_mismatch, "influence remainder: inconsistent dimensions");
  }
  const bool centered = !score_means.empty();
  if (centered && (score_means.rows() != n || score_means.cols() != p)) {
    throw Error(ErrorCode::dimension_mismatch, "score_means must be n x p or empty");
  }
  Vec total(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      total[j] += raw_scores(i, j) - (centered ? score_means(i, j) : 0.0);
    }
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  const Vec linear = (1.0 / root_n) * solve_spd(sigma_pop, total);
  const Vec scaled_err = root_n * (fit.beta_hat - beta_pop);
  return norm2(scaled_err - linear);
}

double influence_remainder(const Dataset& data, const OlsFit& fit, const Mat& sigma_pop,
                           const Vec& beta_pop, const Mat& score_means) {
  if (data.n() != fit.n || data.p() != fit.p) {
    throw Error(ErrorCode::dimension_mismatch, "dataset does not match the fit");
  }
  return linear_representation_remainder(fit, sigma_pop, beta_pop, scores_at(data, beta_pop),
                                         score_means);
}

}  // namespace leanreg
