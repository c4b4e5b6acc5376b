#include "leanreg/variance.hpp"

#include <cmath>
#include <string>

#include "leanreg/error.hpp"

namespace leanreg {
namespace {

Mat inverse_sigma_hat(const OlsFit& fit) {
  try {
    return inverse_spd(fit.sigma_hat);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::not_positive_definite) {
      throw Error(ErrorCode::singular_design, std::string("design is singular: ") + e.what());
    }
    throw;
  }
}

Vec standard_errors(const Mat& avar, std::size_t n) {
  Vec se(avar.rows());
  for (std::size_t j = 0; j < avar.rows(); ++j) {
    se[j] = std::sqrt(std::max(0.0, avar(j, j)) / static_cast<double>(n));
  }
  return se;
}

}  // namespace

std::string_view to_string(VarianceMethod m) noexcept {
  switch (m) {
    case VarianceMethod::classical: return "classical";
    case VarianceMethod::sandwich_hc0: return "hc0";
    case VarianceMethod::sandwich_hc1: return "hc1";
  }
  return "unknown";
}

Mat k_check(const OlsFit& fit) {
  const std::size_t p = fit.p;
  Mat k(p, p);
  for (std::size_t i = 0; i < fit.n; ++i) {
    const auto xi = fit.scores_hat.row(i);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t l = 0; l <= j; ++l) k(j, l) += xi[j] * xi[l];
  }
  const double inv_n = 1.0 / static_cast<double>(fit.n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t l = 0; l <= j; ++l) {
      k(j, l) *= inv_n;
      k(l, j) = k(j, l);
    }
  }
  return k;
}

VarianceEstimate sandwich_avar(const OlsFit& fit, bool dof_correct) {
  if (dof_correct && fit.n <= fit.p) {
    throw Error(ErrorCode::degenerate_dof, "HC1 correction needs n > p");
  }
  const Mat bread = inverse_sigma_hat(fit);
  Mat meat = k_check(fit);
  Mat avar = symmetric_part(bread * meat * bread);
  if (dof_correct) {
    avar = (static_cast<double>(fit.n) / static_cast<double>(fit.n - fit.p)) * avar;
  }
  VarianceEstimate v;
  v.method = dof_correct ? VarianceMethod::sandwich_hc1 : VarianceMethod::sandwich_hc0;
  v.se = standard_errors(avar, fit.n);
  v.avar = std::move(avar);
  v.meat = std::move(meat);
  return v;
}

VarianceEstimate classical_avar(const OlsFit& fit) {
  if (fit.n <= fit.p) {
    throw Error(ErrorCode::degenerate_dof, "classical variance needs n > p");
  }
  double rss = 0.0;
  for (double e : fit.residuals) rss += e * e;
  const double sigma2 = rss / static_cast<double>(fit.n - fit.p);

  VarianceEstimate v;
  v.method = VarianceMethod::classical;
  v.avar = sigma2 * inverse_sigma_hat(fit);
  v.se = standard_errors(v.avar, fit.n);
  v.meat = sigma2 * fit.sigma_hat;
  return v;
}

}  // namespace leanreg
