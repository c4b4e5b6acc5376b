#include "leanreg/testing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "leanreg/error.hpp"

namespace leanreg {
namespace {

double studentized(const OlsFit& fit, const VarianceEstimate& var, std::size_t j,
                   double beta0) {
  if (j >= fit.p) {
    throw Error(ErrorCode::bad_coordinate,
                "coordinate " + std::to_string(j) + " out of range for p = " +
                    std::to_string(fit.p));
  }
  if (var.avar.rows() != fit.p) {
    throw Error(ErrorCode::dimension_mismatch, "variance estimate does not match the fit");
  }
  if (!(var.avar(j, j) > 0.0)) {
    throw Error(ErrorCode::zero_variance,
                "coordinate " + std::to_string(j) + " has zero estimated variance");
  }
  return std::sqrt(static_cast<double>(fit.n)) * (fit.beta_hat[j] - beta0) /
         std::sqrt(var.avar(j, j));
}

double residual_df(const OlsFit& fit) {
  if (fit.n <= fit.p) throw Error(ErrorCode::degenerate_dof, "student_t reference needs n > p");
  return static_cast<double>(fit.n - fit.p);
}

const BootstrapDraws& require_draws(const BootstrapDraws* draws, const OlsFit& fit) {
  if (draws == nullptr) {
    throw Error(ErrorCode::invalid_argument, "bootstrap reference needs bootstrap draws");
  }
  if (draws->draws_u.cols() != fit.p || draws->b == 0) {
    throw Error(ErrorCode::dimension_mismatch, "bootstrap draws do not match the fit");
  }
  return *draws;
}

double bootstrap_p(const std::vector<double>& reference_stats, double statistic) {
  const auto exceed = std::count_if(reference_stats.begin(), reference_stats.end(),
                                    [&](double s) { return s >= statistic; });
  return (1.0 + static_cast<double>(exceed)) /
         (static_cast<double>(reference_stats.size()) + 1.0);
}

}  // namespace

std::string_view to_string(Reference r) noexcept {
  switch (r) {
    case Reference::std_normal: return "std_normal";
    case Reference::student_t: return "student_t";
    case Reference::bootstrap: return "bootstrap";
  }
  return "unknown";
}

double normal_two_sided_p(double statistic) {
  const double a = std::abs(statistic);
  if (!std::isfinite(a)) return 0.0;
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(
                                 boost::math::normal_distribution<double>(), a)));
}

double student_t_two_sided_p(double statistic, double df) {
  const double a = std::abs(statistic);
  if (!std::isfinite(a)) return 0.0;
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(
                                 boost::math::students_t_distribution<double>(df), a)));
}

double normal_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "alpha must lie in (0, 1)");
  }
  return boost::math::quantile(
      boost::math::complement(boost::math::normal_distribution<double>(), alpha / 2.0));
}

TestResult t_test(const OlsFit& fit, const VarianceEstimate& var, std::size_t j, double beta0,
                  Reference reference, const BootstrapDraws* draws) {
  TestResult r;
  r.statistic = studentized(fit, var, j, beta0);
  r.reference = reference;
  r.target_coord = j;
  r.null_value = Vec{beta0};
  switch (reference) {
    case Reference::std_normal:
      r.p_value = normal_two_sided_p(r.statistic);
      break;
    case Reference::student_t:
      r.df = residual_df(fit);
      r.p_value = student_t_two_sided_p(r.statistic, r.df);
      break;
    case Reference::bootstrap: {
      const auto& d = require_draws(draws, fit);
      const double scale = 1.0 / std::sqrt(var.avar(j, j));
      std::vector<double> ref(d.b);
      for (std::size_t b = 0; b < d.b; ++b) ref[b] = std::abs(d.draws_u(b, j)) * scale;
      r.b = d.b;
      r.p_value = bootstrap_p(ref, std::abs(r.statistic));
      break;
    }
  }
  return r;
}

TestResult max_t_test(const OlsFit& fit, const VarianceEstimate& var, const Vec& beta0,
                      Reference reference, const BootstrapDraws* draws) {
  if (beta0.size() != fit.p) {
    throw Error(ErrorCode::dimension_mismatch, "null vector length does not match p");
  }
  TestResult r;
  r.reference = reference;
  r.null_value = beta0;
  for (std::size_t j = 0; j < fit.p; ++j) {
    r.statistic = std::max(r.statistic, std::abs(studentized(fit, var, j, beta0[j])));
  }
  const double p = static_cast<double>(fit.p);
  switch (reference) {
    case Reference::std_normal:
      r.p_value = std::min(1.0, p * normal_two_sided_p(r.statistic));
      break;
    case Reference::student_t:
      r.df = residual_df(fit);
      r.p_value = std::min(1.0, p * student_t_two_sided_p(r.statistic, r.df));
      break;
    case Reference::bootstrap: {
      const auto& d = require_draws(draws, fit);
      r.b = d.b;
      r.p_value = bootstrap_p(studentized_max_draws(d, var), r.statistic);
      break;
    }
  }
  return r;
}

}  // namespace leanreg
