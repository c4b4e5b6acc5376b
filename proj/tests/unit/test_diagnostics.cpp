#include <gtest/gtest.h>

#include <array>
#include <random>

#include "leanreg/diagnostics.hpp"
#include "leanreg/error.hpp"
#include "oracles.hpp"

using namespace leanreg;

namespace {

// Symmetric perturbation with operator norm exactly `norm`.
Mat scaled_symmetric(std::size_t p, double norm, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Mat e(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) e(i, j) = e(j, i) = z(rng);
  const double current = op_norm(e);
  return (norm / current) * e;
}

}  // namespace

TEST(DetInequality, ZeroPerturbation) {
  const Mat s{{2, 0.5}, {0.5, 1}};
  const Vec g{1, -1};
  const auto r = det_inequality_check(s, g, s, g);
  EXPECT_EQ(r.d2n, 0.0);
  EXPECT_LE(r.remainder_norm, 1e-15);
  EXPECT_TRUE(r.precondition_holds);
  EXPECT_TRUE(r.sandwich_ok);
  EXPECT_TRUE(r.remainder_ok);
}

TEST(DetInequality, OnlyGammaPerturbed) {
  const Mat s{{2, 0.5}, {0.5, 1}};
  const auto r = det_inequality_check(s, Vec{1.3, -0.2}, s, Vec{1, -1});
  EXPECT_EQ(r.d2n, 0.0);
  EXPECT_NEAR(r.remainder_norm, 0.0, 1e-15);
  EXPECT_NEAR(r.err_norm, r.lin_term_norm, 1e-14);
  EXPECT_TRUE(r.sandwich_ok && r.remainder_ok);
}

TEST(DetInequality, FuzzWithinPrecondition) {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t p = std::array<std::size_t, 3>{2, 5, 10}[t % 3];
    const Mat sigma = oracle::random_spd(p, rng);
    const Vec gamma = oracle::random_vec(p, rng);
    const double lambda = eig_sym_extremes(sigma).lambda_min;
    const Mat sigma_hat = sigma + scaled_symmetric(p, frac(rng) * lambda / 2.0, rng);
    const Vec gamma_hat = gamma + frac(rng) * oracle::random_vec(p, rng);
    const auto r = det_inequality_check(sigma_hat, gamma_hat, sigma, gamma);
    ASSERT_TRUE(r.precondition_holds) << t;
    ASSERT_TRUE(r.sandwich_ok) << t;
    ASSERT_TRUE(r.remainder_ok) << t;
    EXPECT_GE(r.err_norm, 0.0);
  }
}

TEST(DetInequality, SharpnessNearBoundary) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 300; ++t) {
    const std::size_t p = 2 + static_cast<std::size_t>(t % 4);
    const Mat sigma = oracle::random_spd(p, rng);
    const Vec gamma = oracle::random_vec(p, rng);
    const double lambda = eig_sym_extremes(sigma).lambda_min;
    const Mat sigma_hat = sigma + scaled_symmetric(p, 0.4999999 * lambda, rng);
    const auto r = det_inequality_check(sigma_hat, gamma + oracle::random_vec(p, rng), sigma, gamma);
    ASSERT_TRUE(r.precondition_holds);
    const double ratio = r.err_norm / r.lin_term_norm;
    EXPECT_GE(ratio, 0.5 - 1e-9);
    EXPECT_LE(ratio, 2.0 + 1e-9);
  }
}

TEST(DetInequality, PreconditionReportedFalseOutsideRegime) {
  const Mat sigma = Mat::identity(2);
  const Mat sigma_hat{{3, 0}, {0, 1}};
  const auto r = det_inequality_check(sigma_hat, Vec{1, 1}, sigma, Vec{1, 1});
  EXPECT_FALSE(r.precondition_holds);
  EXPECT_NEAR(r.d2n, 2.0, 1e-12);
  EXPECT_NEAR(r.lambda_n, 1.0, 1e-12);
}

TEST(InfluenceRemainder, ExactWhenSigmaHatIsSigma) {
  // Orthonormal design: columns of x / sqrt(n) orthonormal, so sigma_hat = I.
  const Mat x{{1, 1}, {1, -1}, {1, 1}, {1, -1}};
  std::mt19937_64 rng(2);
  const Dataset d{x, oracle::random_vec(4, rng)};
  const OlsFit fit = fit_ols(d);
  const Vec beta_pop{0.3, -0.7};
  EXPECT_LE(influence_remainder(d, fit, Mat::identity(2), beta_pop, Mat()), 1e-14);
  EXPECT_THROW(influence_remainder(d, fit, Mat::identity(3), beta_pop, Mat()), Error);
}

TEST(InfluenceRemainder, CenteringIsInternallyConsistent) {
  std::mt19937_64 rng(3);
  const std::size_t n = 30;
  Dataset d{Mat(n, 2), Vec(n)};
  for (std::size_t i = 0; i < n; ++i) {
    d.x(i, 0) = 1.0;
    d.x(i, 1) = static_cast<double>(i) / n;
  }
  d.y = oracle::random_vec(n, rng);
  const OlsFit fit = fit_ols(d);
  const Mat sigma = oracle::random_spd(2, rng, 1.0);
  const Vec beta{0.1, 0.2};
  const Mat raw = scores_at(d, beta);
  Mat means(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    means(i, 0) = 0.01 * static_cast<double>(i);
    means(i, 1) = -0.02;
  }
  const double base = linear_representation_remainder(fit, sigma, beta, raw, means);
  const Vec c{0.5, -1.5};
  Mat raw_c = raw, means_c = means;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      raw_c(i, j) -= c[j];
      means_c(i, j) -= c[j];
    }
  EXPECT_NEAR(linear_representation_remainder(fit, sigma, beta, raw_c, means_c), base, 1e-12);
  EXPECT_NEAR(influence_remainder(d, fit, sigma, beta, means), base, 1e-12);
}
