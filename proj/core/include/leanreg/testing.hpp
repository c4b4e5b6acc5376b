#pragma once

// Conservative tests for single coefficients and for the whole vector.
//
// With a sandwich variance the studentized statistic is asymptotically normal
// with variance AV_n(j,j) / AV*_n(j,j) <= 1, so a standard normal reference
// over-covers. Student-t references add a little more conservativeness. Both
// are asymptotic statements: in small samples these tests need not hold
// their level.

#include <cstddef>
#include <optional>
#include <string_view>

#include "leanreg/bootstrap.hpp"
#include "leanreg/linalg.hpp"
#include "leanreg/ols.hpp"
#include "leanreg/variance.hpp"

namespace leanreg {

enum class Reference { std_normal, student_t, bootstrap };

std::string_view to_string(Reference r) noexcept;

struct TestResult {
  double statistic = 0.0;
  Reference reference = Reference::std_normal;
  double df = 0.0;         // student_t only
  std::size_t b = 0;       // bootstrap only
  double p_value = 1.0;
  bool conservative = true;
  std::optional<std::size_t> target_coord;
  Vec null_value;
};

/// Two-sided test of beta_n(j) = beta0 with t_j = sqrt(n)(beta_hat(j) - beta0)
/// / sqrt(avar(j,j)). The bootstrap reference needs `draws` and compares |t_j|
/// with |U*_b(j)| / sqrt(avar(j,j)); student_t uses df = n - p.
/// Throws bad_coordinate, zero_variance, degenerate_dof, invalid_argument.
TestResult t_test(const OlsFit& fit, const VarianceEstimate& var, std::size_t j, double beta0,
                  Reference reference = Reference::std_normal,
                  const BootstrapDraws* draws = nullptr);

/// max_j |t_j| against beta0. Bootstrap p-values are (1 + #{M*_b >= T}) /
/// (B + 1); the analytic references use the Bonferroni bound
/// min(1, p * two-sided tail(T)) because no joint law is available.
TestResult max_t_test(const OlsFit& fit, const VarianceEstimate& var, const Vec& beta0,
                      Reference reference = Reference::std_normal,
                      const BootstrapDraws* draws = nullptr);

/// Two-sided tail probabilities.
double normal_two_sided_p(double statistic);
double student_t_two_sided_p(double statistic, double df);
/// Upper 1 - alpha/2 standard normal quantile.
double normal_critical_value(double alpha);

}  // namespace leanreg
