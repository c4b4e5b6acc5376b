#include "leanreg/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "leanreg/error.hpp"
#include "leanreg/parallel.hpp"

namespace leanreg {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "alpha must lie in (0, 1)");
  }
}

void check_draws(const OlsFit& fit, const BootstrapDraws& draws) {
  if (draws.draws_t.cols() != fit.p || draws.draws_u.cols() != fit.p || draws.b == 0 ||
      draws.draws_t.rows() != draws.b) {
    throw Error(ErrorCode::dimension_mismatch, "bootstrap draws do not match the fit");
  }
}

}  // namespace

std::string_view to_string(WeightDist d) noexcept {
  return d == WeightDist::gaussian ? "gaussian" : "rademacher";
}

std::string_view to_string(BootstrapMethod m) noexcept {
  return m == BootstrapMethod::multiplier ? "multiplier" : "resample_m_of_n";
}

std::string_view to_string(RegionShape s) noexcept {
  return s == RegionShape::rectangle ? "rectangle" : "ellipsoid";
}

Vec gen_weights(WeightDist dist, std::size_t n, Rng& rng) {
  Vec w(n);
  if (dist == WeightDist::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : w) v = normal(rng);
  } else {
    for (double& v : w) v = (rng() >> 63) != 0 ? 1.0 : -1.0;
  }
  return w;
}

Vec multiplier_draw(const OlsFit& fit, const Vec& weights) {
  if (weights.size() != fit.n) {
    throw Error(ErrorCode::dimension_mismatch, "multiplier weights must have length n");
  }
  Vec t(fit.p);
  for (std::size_t i = 0; i < fit.n; ++i) {
    const auto s = fit.scores_hat.row(i);
    for (std::size_t j = 0; j < fit.p; ++j) t[j] += weights[i] * s[j];
  }
  return (1.0 / std::sqrt(static_cast<double>(fit.n))) * t;
}

Vec resample_draw(const OlsFit& fit, std::size_t m, Rng& rng) {
  if (m == 0) throw Error(ErrorCode::invalid_argument, "resample size m must be >= 1");
  std::uniform_int_distribution<std::size_t> pick(0, fit.n - 1);
  Vec t(fit.p);
  for (std::size_t k = 0; k < m; ++k) {
    const auto s = fit.scores_hat.row(pick(rng));
    for (std::size_t j = 0; j < fit.p; ++j) t[j] += s[j];
  }
  return (1.0 / std::sqrt(static_cast<double>(m))) * t;
}

BootstrapDraws run_bootstrap(const OlsFit& fit, const BootstrapOptions& options) {
  if (options.b == 0) throw Error(ErrorCode::invalid_argument, "bootstrap needs B >= 1");
  BootstrapDraws out;
  out.method = options.method;
  out.b = options.b;
  out.m = options.method == BootstrapMethod::resample_m_of_n
              ? (options.m == 0 ? fit.n : options.m)
              : 0;
  out.dist = options.dist;
  out.seed = options.seed;
  out.draws_t = Mat(options.b, fit.p);

  parallel_for(options.b, options.threads, [&](std::size_t b) {
    Rng rng = make_rng(options.seed, b);
    const Vec t = options.method == BootstrapMethod::multiplier
                      ? multiplier_draw(fit, gen_weights(options.dist, fit.n, rng))
                      : resample_draw(fit, out.m, rng);
    std::copy(t.begin(), t.end(), out.draws_t.row(b).begin());
  });

  // U*_b = sigma_hat^-1 T*_b, i.e. draws_t * sigma_hat^-T row by row.
  Mat bread;
  try {
    bread = inverse_spd(fit.sigma_hat);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::not_positive_definite) {
      throw Error(ErrorCode::singular_design, std::string("design is singular: ") + e.what());
    }
    throw;
  }
  out.draws_u = out.draws_t * transpose(bread);
  return out;
}

std::size_t quantile_rank(double alpha, std::size_t b) {
  check_alpha(alpha);
  if (b == 0) throw Error(ErrorCode::invalid_argument, "quantile of an empty sample");
  // The small offset keeps exact products such as 0.95 * 1000 from rounding up
  // a whole rank.
  const double target = (1.0 - alpha) * static_cast<double>(b + 1);
  const double rank = std::ceil(target - 1e-9 * std::max(1.0, target));
  return static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(b)));
}

double upper_quantile(std::vector<double> values, double alpha) {
  const std::size_t k = quantile_rank(alpha, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   values.end());
  return values[k - 1];
}

std::vector<double> studentized_max_draws(const BootstrapDraws& draws,
                                          const VarianceEstimate& var) {
  const std::size_t p = draws.draws_u.cols();
  if (var.avar.rows() != p) {
    throw Error(ErrorCode::dimension_mismatch, "variance estimate does not match the draws");
  }
  Vec scale(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (!(var.avar(j, j) > 0.0)) {
      throw Error(ErrorCode::zero_variance,
                  "coordinate " + std::to_string(j) + " has zero estimated variance");
    }
    scale[j] = 1.0 / std::sqrt(var.avar(j, j));
  }
  std::vector<double> out(draws.draws_u.rows());
  for (std::size_t b = 0; b < out.size(); ++b) {
    const auto u = draws.draws_u.row(b);
    double m = 0.0;
    for (std::size_t j = 0; j < p; ++j) m = std::max(m, std::abs(u[j]) * scale[j]);
    out[b] = m;
  }
  return out;
}

bool ConfidenceRegion::contains(const Vec& beta) const {
  if (beta.size() != center.size()) {
    throw Error(ErrorCode::dimension_mismatch, "contains: beta length does not match region");
  }
  const Vec d = center - beta;
  if (shape == RegionShape::rectangle) {
    for (std::size_t j = 0; j < d.size(); ++j)
      if (std::abs(d[j]) > half_widths[j]) return false;
    return true;
  }
  return static_cast<double>(n) * leanreg::quad_form(quad_form, d) <= radius;
}

ConfidenceRegion region_rectangle(const OlsFit& fit, const BootstrapDraws& draws,
                                  const VarianceEstimate& var, double alpha) {
  check_alpha(alpha);
  check_draws(fit, draws);
  if (var.method == VarianceMethod::classical) {
    throw Error(ErrorCode::invalid_argument, "rectangle regions need a sandwich variance");
  }
  const double c = upper_quantile(studentized_max_draws(draws, var), alpha);

  ConfidenceRegion r;
  r.shape = RegionShape::rectangle;
  r.level = 1.0 - alpha;
  r.center = fit.beta_hat;
  r.n = fit.n;
  r.half_widths = Vec(fit.p);
  for (std::size_t j = 0; j < fit.p; ++j) {
    r.half_widths[j] = c * std::sqrt(var.avar(j, j) / static_cast<double>(fit.n));
  }
  return r;
}

ConfidenceRegion region_ellipsoid(const OlsFit& fit, const BootstrapDraws& draws, double alpha) {
  check_alpha(alpha);
  check_draws(fit, draws);
  const Mat k = k_check(fit);
  const Mat k_inv_sigma = solve_spd(k, fit.sigma_hat);  // throws not_positive_definite

  const Mat k_inv_t = solve_spd(k, transpose(draws.draws_t));
  std::vector<double> stats(draws.b);
  for (std::size_t b = 0; b < draws.b; ++b) {
    double s = 0.0;
    for (std::size_t j = 0; j < fit.p; ++j) s += draws.draws_t(b, j) * k_inv_t(j, b);
    stats[b] = s;
  }

  ConfidenceRegion r;
  r.shape = RegionShape::ellipsoid;
  r.level = 1.0 - alpha;
  r.center = fit.beta_hat;
  r.n = fit.n;
  r.quad_form = symmetric_part(fit.sigma_hat * k_inv_sigma);
  r.radius = upper_quantile(std::move(stats), alpha);
  return r;
}

}  // namespace leanreg
