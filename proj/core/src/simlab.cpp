#include "leanreg/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "leanreg/diagnostics.hpp"
#include "leanreg/error.hpp"
#include "leanreg/parallel.hpp"
#include "leanreg/testing.hpp"
#include "leanreg/variance.hpp"

namespace leanreg {
namespace {

constexpr double kIntegrationTol = 1e-10;

// Conditional mean and standard deviation of y given the scalar design
// coordinate u (U for random designs, i/n for fixed ones). p == 2 kinds only.
double conditional_mean(DgpKind kind, double u) {
  switch (kind) {
    case DgpKind::quadratic_mean_iid:
    case DgpKind::fixed_x_nonidentical_mean:
      return u * u;
    case DgpKind::heteroscedastic_iid:
    case DgpKind::fixed_x_heteroscedastic:
      return 1.0 + u;
    case DgpKind::linear_homoscedastic:
      break;
  }
  throw Error(ErrorCode::invalid_argument, "conditional_mean: unsupported kind");
}

double conditional_sd(const Dgp& dgp, double u) {
  switch (dgp.kind) {
    case DgpKind::quadratic_mean_iid:
      return dgp.noise_scale;
    case DgpKind::heteroscedastic_iid:
      return dgp.noise_scale * (0.2 + std::abs(u - 0.5));
    case DgpKind::fixed_x_heteroscedastic:
    case DgpKind::fixed_x_nonidentical_mean:
      return dgp.noise_scale * (0.1 + u);
    case DgpKind::linear_homoscedastic:
      break;
  }
  throw Error(ErrorCode::invalid_argument, "conditional_sd: unsupported kind");
}

// Integral over [0, 1], split at the kink of |u - 1/2|.
double integrate_unit(const std::function<double(double)>& f) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (auto [a, b] : {std::pair{0.0, 0.5}, std::pair{0.5, 1.0}}) {
    double error = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14, &error);
    if (!std::isfinite(v) || error > kIntegrationTol) {
      throw Error(ErrorCode::integration_failure,
                  "quadrature error estimate " + std::to_string(error) + " exceeds tolerance");
    }
    total += v;
  }
  return total;
}

Mat sandwich_of(const Mat& sigma, const Mat& meat) {
  const Mat bread = inverse_spd(sigma);
  return symmetric_part(bread * meat * bread);
}

void finish_targets(PopulationTargets& t, const Mat& centered_outer) {
  t.k_n = symmetric_part(t.k_n_star - centered_outer);
  t.av_n = sandwich_of(t.sigma_n, t.k_n);
  t.av_n_star = sandwich_of(t.sigma_n, t.k_n_star);
}

PopulationTargets linear_targets(const Dgp& dgp) {
  const std::size_t p = dgp.p;
  PopulationTargets t;
  t.sigma_n = Mat(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < p; ++k) {
      if (j == 0 || k == 0) {
        t.sigma_n(j, k) = (j == k) ? 1.0 : 0.5;
      } else {
        t.sigma_n(j, k) = (j == k) ? 1.0 / 3.0 : 0.25;
      }
    }
  }
  t.beta_n = dgp.slope;
  t.gamma_n = t.sigma_n * dgp.slope;
  const double s2 = dgp.noise_scale * dgp.noise_scale;
  t.k_n_star = s2 * t.sigma_n;
  finish_targets(t, Mat(p, p));
  return t;
}

PopulationTargets random_design_targets(const Dgp& dgp) {
  PopulationTargets t;
  t.sigma_n = Mat(2, 2);
  t.gamma_n = Vec(2);
  for (std::size_t j = 0; j < 2; ++j) {
    t.gamma_n[j] = integrate_unit(
        [&](double u) { return std::pow(u, static_cast<double>(j)) * conditional_mean(dgp.kind, u); });
    for (std::size_t k = 0; k < 2; ++k) {
      t.sigma_n(j, k) = integrate_unit(
          [&](double u) { return std::pow(u, static_cast<double>(j + k)); });
    }
  }
  t.beta_n = target_from_moments(t.sigma_n, t.gamma_n);
  const Vec beta = t.beta_n;
  t.k_n_star = Mat(2, 2);
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t k = 0; k <= j; ++k) {
      t.k_n_star(j, k) = integrate_unit([&](double u) {
        const double bias = conditional_mean(dgp.kind, u) - beta[0] - beta[1] * u;
        const double sd = conditional_sd(dgp, u);
        return std::pow(u, static_cast<double>(j + k)) * (bias * bias + sd * sd);
      });
      t.k_n_star(k, j) = t.k_n_star(j, k);
    }
  }
  // iid: every observation has the same score mean, gamma - sigma beta, which
  // vanishes by the definition of beta_n.
  const Vec mean = t.gamma_n - t.sigma_n * t.beta_n;
  Mat outer(2, 2);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) outer(j, k) = mean[j] * mean[k];
  finish_targets(t, outer);
  return t;
}

double design_point(std::size_t i, std::size_t n) {
  return static_cast<double>(i + 1) / static_cast<double>(n);
}

PopulationTargets fixed_design_targets(const Dgp& dgp, std::size_t n) {
  const double inv_n = 1.0 / static_cast<double>(n);
  PopulationTargets t;
  t.sigma_n = Mat(2, 2);
  t.gamma_n = Vec(2);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = design_point(i, n);
    const double x[2] = {1.0, u};
    const double mu = conditional_mean(dgp.kind, u);
    for (std::size_t j = 0; j < 2; ++j) {
      t.gamma_n[j] += inv_n * x[j] * mu;
      for (std::size_t k = 0; k < 2; ++k) t.sigma_n(j, k) += inv_n * x[j] * x[k];
    }
  }
  t.beta_n = target_from_moments(t.sigma_n, t.gamma_n);

  t.score_means = Mat(n, 2);
  t.k_n_star = Mat(2, 2);
  Mat outer(2, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = design_point(i, n);
    const double x[2] = {1.0, u};
    const double bias = conditional_mean(dgp.kind, u) - t.beta_n[0] - t.beta_n[1] * u;
    const double sd = conditional_sd(dgp, u);
    for (std::size_t j = 0; j < 2; ++j) {
      t.score_means(i, j) = x[j] * bias;
      for (std::size_t k = 0; k < 2; ++k) {
        t.k_n_star(j, k) += inv_n * x[j] * x[k] * (bias * bias + sd * sd);
        outer(j, k) += inv_n * x[j] * x[k] * bias * bias;
      }
    }
  }
  finish_targets(t, outer);
  return t;
}

struct Replication {
  bool ok = false;
  // One row per method: per-coordinate hits, or a single joint hit.
  std::vector<std::vector<bool>> covered;
  std::vector<std::vector<double>> width;
  bool reject_max_t_normal = false;
  bool reject_max_t_bootstrap = false;
  double beta_error = 0.0;
};

bool is_bootstrap_method(CoverageMethod m) {
  return m == CoverageMethod::bootstrap_rectangle || m == CoverageMethod::bootstrap_ellipsoid;
}

bool excluded_error(const Error& e) {
  return e.code() == ErrorCode::singular_design || e.code() == ErrorCode::not_positive_definite;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// Runs fn(r, rng) over replications; entries whose fit is singular come back as NaN.
template <typename Fn>
std::vector<double> replicate_scalar(std::size_t replications, std::uint64_t seed,
                                     unsigned threads, Fn&& fn) {
  std::vector<double> out(replications, std::nan(""));
  parallel_for(replications, threads, [&](std::size_t r) {
    Rng rng = make_rng(seed, r);
    try {
      out[r] = fn(rng);
    } catch (const Error& e) {
      if (!excluded_error(e)) throw;
    }
  });
  return out;
}

std::vector<double> drop_nan(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v)
    if (!std::isnan(x)) out.push_back(x);
  return out;
}

}  // namespace

std::string_view to_string(DgpKind k) noexcept {
  switch (k) {
    case DgpKind::linear_homoscedastic: return "linear_homoscedastic";
    case DgpKind::quadratic_mean_iid: return "quadratic_mean_iid";
    case DgpKind::heteroscedastic_iid: return "heteroscedastic_iid";
    case DgpKind::fixed_x_heteroscedastic: return "fixed_x_heteroscedastic";
    case DgpKind::fixed_x_nonidentical_mean: return "fixed_x_nonidentical_mean";
  }
  return "unknown";
}

const std::vector<DgpKind>& all_dgp_kinds() {
  static const std::vector<DgpKind> kinds = {
      DgpKind::linear_homoscedastic, DgpKind::quadratic_mean_iid, DgpKind::heteroscedastic_iid,
      DgpKind::fixed_x_heteroscedastic, DgpKind::fixed_x_nonidentical_mean};
  return kinds;
}

std::optional<DgpKind> parse_dgp_kind(std::string_view name) noexcept {
  for (DgpKind k : all_dgp_kinds())
    if (to_string(k) == name) return k;
  return std::nullopt;
}

Dgp Dgp::canonical(DgpKind kind) {
  switch (kind) {
    case DgpKind::linear_homoscedastic: return linear(2, 1.0);
    case DgpKind::quadratic_mean_iid: return Dgp{kind, 2, 0.1, {}};
    case DgpKind::heteroscedastic_iid:
    case DgpKind::fixed_x_heteroscedastic:
    case DgpKind::fixed_x_nonidentical_mean:
      return Dgp{kind, 2, 1.0, {}};
  }
  throw Error(ErrorCode::invalid_argument, "unknown DGP kind");
}

Dgp Dgp::linear(std::size_t p, double noise_scale) {
  Dgp d{DgpKind::linear_homoscedastic, p, noise_scale, Vec(p)};
  for (std::size_t j = 0; j < p; ++j) d.slope[j] = static_cast<double>(j + 1);
  return d;
}

bool Dgp::fixed_design() const noexcept {
  return kind == DgpKind::fixed_x_heteroscedastic || kind == DgpKind::fixed_x_nonidentical_mean;
}

void validate(const Dgp& dgp) {
  if (!(dgp.noise_scale >= 0.0) || !std::isfinite(dgp.noise_scale)) {
    throw Error(ErrorCode::invalid_argument, "noise_scale must be finite and non-negative");
  }
  if (dgp.kind == DgpKind::linear_homoscedastic) {
    if (dgp.p < 1 || dgp.slope.size() != dgp.p) {
      throw Error(ErrorCode::invalid_argument, "linear DGP needs p >= 1 and a slope of length p");
    }
  } else if (dgp.p != 2) {
    throw Error(ErrorCode::invalid_argument,
                std::string(to_string(dgp.kind)) + " is defined for p = 2 only");
  }
}

PopulationTargets population_targets(const Dgp& dgp, std::size_t n) {
  validate(dgp);
  if (n == 0) throw Error(ErrorCode::invalid_argument, "population targets need n >= 1");
  if (dgp.kind == DgpKind::linear_homoscedastic) return linear_targets(dgp);
  if (dgp.fixed_design()) {
    if (n < 2) throw Error(ErrorCode::singular_design, "fixed design needs n >= 2");
    return fixed_design_targets(dgp, n);
  }
  return random_design_targets(dgp);
}

Mat score_means_at(const Dgp& dgp, std::size_t n, const PopulationTargets& pop, const Vec& beta) {
  const std::size_t p = pop.sigma_n.rows();
  if (beta.size() != p) throw Error(ErrorCode::dimension_mismatch, "beta length does not match p");
  Mat m(n, p);
  if (dgp.iid()) {
    const Vec mean = pop.gamma_n - pop.sigma_n * beta;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) m(i, j) = mean[j];
    return m;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double u = design_point(i, n);
    const double bias = conditional_mean(dgp.kind, u) - beta[0] - beta[1] * u;
    m(i, 0) = bias;
    m(i, 1) = u * bias;
  }
  return m;
}

Mat fixed_design(const Dgp& dgp, std::size_t n) {
  if (!dgp.fixed_design()) throw Error(ErrorCode::invalid_argument, "not a fixed-design DGP");
  Mat x(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = design_point(i, n);
  }
  return x;
}

Dataset sample(const Dgp& dgp, std::size_t n, Rng& rng) {
  validate(dgp);
  if (n == 0) throw Error(ErrorCode::invalid_argument, "sample needs n >= 1");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset d{Mat(n, dgp.p), Vec(n)};

  if (dgp.fixed_design()) {
    d.x = fixed_design(dgp, n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = d.x(i, 1);
      d.y[i] = conditional_mean(dgp.kind, u) + conditional_sd(dgp, u) * normal(rng);
    }
    return d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    d.x(i, 0) = 1.0;
    for (std::size_t j = 1; j < dgp.p; ++j) d.x(i, j) = uniform(rng);
    const double eps = normal(rng);
    if (dgp.kind == DgpKind::linear_homoscedastic) {
      d.y[i] = dot(d.x.row(i), dgp.slope.span()) + dgp.noise_scale * eps;
    } else {
      const double u = d.x(i, 1);
      d.y[i] = conditional_mean(dgp.kind, u) + conditional_sd(dgp, u) * eps;
    }
  }
  return d;
}

std::string_view to_string(CoverageMethod m) noexcept {
  switch (m) {
    case CoverageMethod::classical_normal: return "classical_normal";
    case CoverageMethod::sandwich_normal: return "sandwich_normal";
    case CoverageMethod::bootstrap_rectangle: return "bootstrap_rectangle";
    case CoverageMethod::bootstrap_ellipsoid: return "bootstrap_ellipsoid";
  }
  return "unknown";
}

const std::vector<CoverageMethod>& all_coverage_methods() {
  static const std::vector<CoverageMethod> methods = {
      CoverageMethod::classical_normal, CoverageMethod::sandwich_normal,
      CoverageMethod::bootstrap_rectangle, CoverageMethod::bootstrap_ellipsoid};
  return methods;
}

std::optional<CoverageMethod> parse_coverage_method(std::string_view name) noexcept {
  for (CoverageMethod m : all_coverage_methods())
    if (to_string(m) == name) return m;
  return std::nullopt;
}

double mc_standard_error(double proportion, std::size_t replications) {
  if (replications == 0) return std::nan("");
  return std::sqrt(proportion * (1.0 - proportion) / static_cast<double>(replications));
}

CoverageReport run_coverage(const Dgp& dgp, std::size_t n, std::size_t replications,
                            const CoverageOptions& options, std::uint64_t seed) {
  validate(dgp);
  if (replications == 0) throw Error(ErrorCode::invalid_argument, "replications must be >= 1");
  if (options.methods.empty()) throw Error(ErrorCode::invalid_argument, "no coverage methods");
  const double z = normal_critical_value(options.alpha);
  const PopulationTargets pop = population_targets(dgp, n);
  const std::size_t p = dgp.p;
  const bool need_bootstrap =
      std::any_of(options.methods.begin(), options.methods.end(), is_bootstrap_method);

  std::vector<Replication> reps(replications);
  parallel_for(replications, options.threads, [&](std::size_t r) {
    Rng rng = make_rng(seed, r);
    Replication& out = reps[r];
    try {
      const Dataset data = sample(dgp, n, rng);
      const OlsFit fit = fit_ols(data);
      const VarianceEstimate sandwich = sandwich_avar(fit);
      out.beta_error = norm2(fit.beta_hat - pop.beta_n);

      std::optional<BootstrapDraws> draws;
      if (need_bootstrap) {
        BootstrapOptions bo;
        bo.b = options.b;
        bo.dist = options.weights;
        bo.seed = derive_seed(derive_seed(seed, r), 0x5eedb007ULL);
        draws = run_bootstrap(fit, bo);
      }

      for (CoverageMethod m : options.methods) {
        std::vector<bool> hit;
        std::vector<double> width(p);
        switch (m) {
          case CoverageMethod::classical_normal:
          case CoverageMethod::sandwich_normal: {
            const VarianceEstimate v =
                m == CoverageMethod::classical_normal ? classical_avar(fit) : sandwich;
            for (std::size_t j = 0; j < p; ++j) {
              width[j] = 2.0 * z * v.se[j];
              hit.push_back(std::abs(fit.beta_hat[j] - pop.beta_n[j]) <= z * v.se[j]);
            }
            break;
          }
          case CoverageMethod::bootstrap_rectangle: {
            const auto region = region_rectangle(fit, *draws, sandwich, options.alpha);
            for (std::size_t j = 0; j < p; ++j) width[j] = 2.0 * region.half_widths[j];
            hit.push_back(region.contains(pop.beta_n));
            break;
          }
          case CoverageMethod::bootstrap_ellipsoid: {
            const auto region = region_ellipsoid(fit, *draws, options.alpha);
            // Projection of the ellipsoid onto coordinate j; quad_form^-1 is
            // the HC0 sandwich.
            for (std::size_t j = 0; j < p; ++j) {
              width[j] =
                  2.0 * std::sqrt(region.radius * sandwich.avar(j, j) / static_cast<double>(n));
            }
            hit.push_back(region.contains(pop.beta_n));
            break;
          }
        }
        out.covered.push_back(std::move(hit));
        out.width.push_back(std::move(width));
      }

      out.reject_max_t_normal =
          max_t_test(fit, sandwich, pop.beta_n, Reference::std_normal).p_value <= options.alpha;
      if (draws) {
        out.reject_max_t_bootstrap =
            max_t_test(fit, sandwich, pop.beta_n, Reference::bootstrap, &*draws).p_value <=
            options.alpha;
      }
      out.ok = true;
    } catch (const Error& e) {
      if (!excluded_error(e)) throw;
      out = Replication{};
    }
  });

  CoverageReport report;
  report.scenario = std::string(to_string(dgp.kind));
  report.n = n;
  report.replications = replications;
  report.alpha = options.alpha;
  report.seed = seed;

  std::vector<double> errors;
  std::size_t used = 0;
  for (const auto& r : reps) {
    if (!r.ok) continue;
    ++used;
    errors.push_back(r.beta_error);
  }
  report.excluded = replications - used;
  report.median_beta_error = median(errors);

  for (std::size_t k = 0; k < options.methods.size(); ++k) {
    MethodCoverage mc;
    mc.method = options.methods[k];
    mc.joint = is_bootstrap_method(mc.method);
    const std::size_t entries = mc.joint ? 1 : p;
    mc.coverage.assign(entries, 0.0);
    mc.mean_width.assign(p, 0.0);
    for (const auto& r : reps) {
      if (!r.ok) continue;
      for (std::size_t e = 0; e < entries; ++e) mc.coverage[e] += r.covered[k][e] ? 1.0 : 0.0;
      for (std::size_t j = 0; j < p; ++j) mc.mean_width[j] += r.width[k][j];
    }
    for (double& c : mc.coverage) c = used ? c / static_cast<double>(used) : std::nan("");
    for (double& w : mc.mean_width) w = used ? w / static_cast<double>(used) : std::nan("");
    for (double c : mc.coverage) mc.mc_se.push_back(mc_standard_error(c, used));
    report.methods.push_back(std::move(mc));
  }

  auto rate = [&](bool Replication::*flag, const char* name) {
    double hits = 0.0;
    for (const auto& r : reps)
      if (r.ok && r.*flag) hits += 1.0;
    const double c = used ? hits / static_cast<double>(used) : std::nan("");
    report.null_tests.push_back({name, c, mc_standard_error(c, used)});
  };
  rate(&Replication::reject_max_t_normal, "max_t_normal");
  if (need_bootstrap) rate(&Replication::reject_max_t_bootstrap, "max_t_bootstrap");
  return report;
}

ConsistencyReport run_consistency(const Dgp& dgp, const std::vector<std::size_t>& n_grid,
                                  std::size_t replications, std::uint64_t seed,
                                  unsigned threads) {
  validate(dgp);
  if (n_grid.empty() || replications == 0) {
    throw Error(ErrorCode::invalid_argument, "consistency needs a grid and replications >= 1");
  }
  for (std::size_t k = 1; k < n_grid.size(); ++k) {
    if (n_grid[k] <= n_grid[k - 1]) {
      throw Error(ErrorCode::invalid_argument, "n_grid must be strictly increasing");
    }
  }
  ConsistencyReport report;
  report.scenario = std::string(to_string(dgp.kind));
  report.n_grid = n_grid;
  report.replications = replications;
  report.seed = seed;

  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    const std::size_t n = n_grid[k];
    const PopulationTargets pop = population_targets(dgp, n);
    const auto errors = replicate_scalar(replications, derive_seed(seed, k), threads,
                                         [&](Rng& rng) {
                                           const OlsFit fit = fit_ols(sample(dgp, n, rng));
                                           return norm2(fit.beta_hat - pop.beta_n);
                                         });
    const auto kept = drop_nan(errors);
    report.excluded += errors.size() - kept.size();
    report.median_error.push_back(median(kept));
  }

  if (n_grid.size() >= 2) {
    double mx = 0.0, my = 0.0;
    const double m = static_cast<double>(n_grid.size());
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
      mx += std::log(static_cast<double>(n_grid[k])) / m;
      my += std::log(report.median_error[k]) / m;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
      const double dx = std::log(static_cast<double>(n_grid[k])) - mx;
      sxy += dx * (std::log(report.median_error[k]) - my);
      sxx += dx * dx;
    }
    report.log_log_slope = sxy / sxx;
  }
  return report;
}

double median_sandwich_error(const Dgp& dgp, std::size_t n, std::size_t replications,
                             std::uint64_t seed, unsigned threads) {
  const PopulationTargets pop = population_targets(dgp, n);
  return median(drop_nan(replicate_scalar(replications, seed, threads, [&](Rng& rng) {
    const OlsFit fit = fit_ols(sample(dgp, n, rng));
    return op_norm(symmetric_part(k_check(fit) - pop.k_n_star));
  })));
}

double median_influence_remainder(const Dgp& dgp, std::size_t n, std::size_t replications,
                                  std::uint64_t seed, unsigned threads, const Vec& beta_shift) {
  const PopulationTargets pop = population_targets(dgp, n);
  Vec beta = pop.beta_n;
  Mat means = pop.score_means;
  if (!beta_shift.empty()) {
    beta = beta + beta_shift;
    means = score_means_at(dgp, n, pop, beta);
  }
  return median(drop_nan(replicate_scalar(replications, seed, threads, [&](Rng& rng) {
    const Dataset data = sample(dgp, n, rng);
    const OlsFit fit = fit_ols(data);
    return influence_remainder(data, fit, pop.sigma_n, beta, means);
  })));
}

}  // namespace leanreg
