#pragma once

// Score bootstraps for T_n = sqrt(n) sigma_hat (beta_hat - beta_n).
//
// Both schemes perturb the estimated scores x_i e_i directly rather than the
// data, so no replicate ever refits a (possibly singular) least squares
// problem. Regions for beta_n follow from U* = sigma_hat^-1 T*.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "leanreg/linalg.hpp"
#include "leanreg/ols.hpp"
#include "leanreg/rng.hpp"
#include "leanreg/variance.hpp"

namespace leanreg {

/// Multiplier weight law. Both have mean 0, variance 1 and finite third
/// absolute moment. Gaussian weights make T* | data exactly N(0, k_check).
enum class WeightDist { gaussian, rademacher };

enum class BootstrapMethod { multiplier, resample_m_of_n };

std::string_view to_string(WeightDist d) noexcept;
std::string_view to_string(BootstrapMethod m) noexcept;

struct BootstrapOptions {
  BootstrapMethod method = BootstrapMethod::multiplier;
  std::size_t b = 1000;
  std::size_t m = 0;  // resample size; 0 selects m = n
  WeightDist dist = WeightDist::gaussian;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0 = hardware concurrency; never affects results
};

struct BootstrapDraws {
  BootstrapMethod method = BootstrapMethod::multiplier;
  std::size_t b = 0;
  std::size_t m = 0;
  WeightDist dist = WeightDist::gaussian;
  std::uint64_t seed = 0;
  Mat draws_t;  // B x p, rows T*_b
  Mat draws_u;  // B x p, rows sigma_hat^-1 T*_b
};

Vec gen_weights(WeightDist dist, std::size_t n, Rng& rng);

/// n^-1/2 sum_i w_i s_hat_i.
Vec multiplier_draw(const OlsFit& fit, const Vec& weights);

/// m^-1/2 sum_j s_hat_{I_j}, I_j iid uniform on the n observations.
Vec resample_draw(const OlsFit& fit, std::size_t m, Rng& rng);

/// Replicate b draws from make_rng(options.seed, b).
BootstrapDraws run_bootstrap(const OlsFit& fit, const BootstrapOptions& options);

/// 1-based order statistic ceil((1 - alpha)(B + 1)), clamped to [1, B].
std::size_t quantile_rank(double alpha, std::size_t b);

/// Value at quantile_rank(alpha, size) among `values` (sorted internally).
double upper_quantile(std::vector<double> values, double alpha);

/// max_j |U*_b(j)| / sqrt(avar(j,j)) for every replicate. Throws zero_variance.
std::vector<double> studentized_max_draws(const BootstrapDraws& draws,
                                          const VarianceEstimate& var);

enum class RegionShape { rectangle, ellipsoid };

std::string_view to_string(RegionShape s) noexcept;

/// Rectangle: prod_j [center_j +/- half_widths_j].
/// Ellipsoid: { beta : n (center - beta)' quad_form (center - beta) <= radius }.
struct ConfidenceRegion {
  RegionShape shape = RegionShape::rectangle;
  double level = 0.0;
  Vec center;
  Vec half_widths;
  Mat quad_form;
  double radius = 0.0;
  std::size_t n = 0;

  bool contains(const Vec& beta) const;
};

/// Simultaneous max-|t| rectangle calibrated on the bootstrap draws. `var` must
/// be a sandwich estimate.
ConfidenceRegion region_rectangle(const OlsFit& fit, const BootstrapDraws& draws,
                                  const VarianceEstimate& var, double alpha);

/// Ellipsoid with quad_form = sigma_hat k_check^-1 sigma_hat and radius the
/// bootstrap quantile of T*' k_check^-1 T*. Throws not_positive_definite.
ConfidenceRegion region_ellipsoid(const OlsFit& fit, const BootstrapDraws& draws, double alpha);

}  // namespace leanreg
