#pragma once

// Data-generating processes with exactly known population targets, and a
// seeded Monte Carlo engine for coverage, type-I error and rate studies.
//
// Canonical scenarios (U ~ Uniform(0,1), eps ~ N(0,1), s = noise_scale):
//   linear_homoscedastic      x = (1, U_1..U_{p-1}), y = x'slope + s eps   (s = 1, slope = 1,2,..)
//   quadratic_mean_iid        x = (1, U),  y = U^2 + s eps                 (s = 0.1)
//   heteroscedastic_iid       x = (1, U),  y = 1 + U + s (0.2 + |U - 1/2|) eps   (s = 1)
//   fixed_x_heteroscedastic   x_i = (1, i/n), y_i = 1 + i/n + s (0.1 + i/n) eps
//   fixed_x_nonidentical_mean x_i = (1, i/n), y_i = (i/n)^2 + s (0.1 + i/n) eps
// Covariates are bounded, so every moment the theory asks for is finite.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leanreg/bootstrap.hpp"
#include "leanreg/linalg.hpp"
#include "leanreg/ols.hpp"
#include "leanreg/rng.hpp"

namespace leanreg {

enum class DgpKind {
  linear_homoscedastic,
  quadratic_mean_iid,
  heteroscedastic_iid,
  fixed_x_heteroscedastic,
  fixed_x_nonidentical_mean,
};

std::string_view to_string(DgpKind k) noexcept;
std::optional<DgpKind> parse_dgp_kind(std::string_view name) noexcept;
const std::vector<DgpKind>& all_dgp_kinds();

struct Dgp {
  DgpKind kind = DgpKind::quadratic_mean_iid;
  std::size_t p = 2;
  double noise_scale = 0.1;
  Vec slope;  // linear_homoscedastic only

  static Dgp canonical(DgpKind kind);
  /// linear_homoscedastic with p covariates (intercept included).
  static Dgp linear(std::size_t p, double noise_scale = 1.0);

  bool fixed_design() const noexcept;
  bool iid() const noexcept { return !fixed_design(); }
};

/// Throws invalid_argument for an inconsistent Dgp.
void validate(const Dgp& dgp);

struct PopulationTargets {
  Vec beta_n;
  Mat sigma_n;
  Vec gamma_n;
  Mat k_n;       // Var(n^-1/2 sum S_i)
  Mat k_n_star;  // n^-1 sum E[x_i x_i' (y_i - x_i' beta_n)^2]
  Mat av_n;
  Mat av_n_star;
  Mat score_means;  // n x p, E[x_i (y_i - x_i' beta_n)]; empty for iid kinds
};

/// Random designs integrate over the covariate law (adaptive Gauss-Kronrod,
/// absolute error <= 1e-10, exact for the polynomial pieces); fixed designs sum
/// over the design exactly. Throws integration_failure.
PopulationTargets population_targets(const Dgp& dgp, std::size_t n);

/// Per-observation E[x_i (y_i - x_i' beta)] at an arbitrary beta (n x p).
Mat score_means_at(const Dgp& dgp, std::size_t n, const PopulationTargets& pop, const Vec& beta);

/// Fixed designs reproduce x exactly for every seed; only y is redrawn.
Dataset sample(const Dgp& dgp, std::size_t n, Rng& rng);

/// The covariate rows of a fixed design.
Mat fixed_design(const Dgp& dgp, std::size_t n);

enum class CoverageMethod {
  classical_normal,
  sandwich_normal,
  bootstrap_rectangle,
  bootstrap_ellipsoid,
};

std::string_view to_string(CoverageMethod m) noexcept;
std::optional<CoverageMethod> parse_coverage_method(std::string_view name) noexcept;
const std::vector<CoverageMethod>& all_coverage_methods();

struct CoverageOptions {
  std::vector<CoverageMethod> methods = all_coverage_methods();
  double alpha = 0.05;
  std::size_t b = 1000;
  WeightDist weights = WeightDist::gaussian;
  unsigned threads = 1;
};

/// Per-coordinate methods report p entries; joint regions report one coverage
/// entry and per-coordinate projected widths.
struct MethodCoverage {
  CoverageMethod method = CoverageMethod::sandwich_normal;
  bool joint = false;
  std::vector<double> coverage;
  std::vector<double> mc_se;
  std::vector<double> mean_width;
};

struct NullTestRate {
  std::string name;
  double rejection_rate = 0.0;
  double mc_se = 0.0;
};

struct CoverageReport {
  std::string scenario;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::size_t excluded = 0;  // singular replications, left out of every rate
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<MethodCoverage> methods;
  std::vector<NullTestRate> null_tests;
  double median_beta_error = 0.0;  // median ||beta_hat - beta_n||_2
};

/// sqrt(c (1 - c) / r)
double mc_standard_error(double proportion, std::size_t replications);

/// Replication r draws its data from make_rng(seed, r) and its bootstrap from
/// an independent child seed, so the report is identical for any thread count.
/// Null tests: max-|t| with the Bonferroni normal bound, plus the bootstrap
/// reference whenever a bootstrap method is requested.
CoverageReport run_coverage(const Dgp& dgp, std::size_t n, std::size_t replications,
                            const CoverageOptions& options, std::uint64_t seed);

struct ConsistencyReport {
  std::string scenario;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 0;
  std::size_t excluded = 0;
  std::uint64_t seed = 0;
  std::vector<double> median_error;
  double log_log_slope = 0.0;  // least-squares slope of log median error on log n
};

ConsistencyReport run_consistency(const Dgp& dgp, const std::vector<std::size_t>& n_grid,
                                  std::size_t replications, std::uint64_t seed,
                                  unsigned threads = 1);

/// Median over replications of ||k_check - K*_n||_op.
double median_sandwich_error(const Dgp& dgp, std::size_t n, std::size_t replications,
                             std::uint64_t seed, unsigned threads = 1);

/// Median over replications of the linear-representation remainder. A nonzero
/// beta_shift evaluates the representation at beta_n + beta_shift, with score
/// means recomputed there (a negative control that must diverge).
double median_influence_remainder(const Dgp& dgp, std::size_t n, std::size_t replications,
                                  std::uint64_t seed, unsigned threads = 1,
                                  const Vec& beta_shift = {});

}  // namespace leanreg
