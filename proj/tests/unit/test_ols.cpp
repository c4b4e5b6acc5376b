#include <gtest/gtest.h>

#include <random>

#include "leanreg/error.hpp"
#include "leanreg/ols.hpp"
#include "oracles.hpp"

using namespace leanreg;

namespace {

Dataset example() { return {oracle::example_x(), oracle::example_y()}; }

Dataset random_dataset(std::size_t n, std::size_t p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Dataset d{Mat(n, p), Vec(n)};
  for (std::size_t i = 0; i < n; ++i) {
    d.x(i, 0) = 1.0;
    for (std::size_t j = 1; j < p; ++j) d.x(i, j) = normal(rng);
    d.y[i] = normal(rng) + d.x(i, p - 1) * d.x(i, p - 1);
  }
  return d;
}

}  // namespace

TEST(FitOls, ThreePointExample) {
  const auto expect = oracle::cramer_solve({{{1, 1}, {1, 5.0 / 3.0}}}, {5.0 / 3.0, 3.0});
  const OlsFit fit = fit_ols(example());
  EXPECT_NEAR(fit.beta_hat[0], -1.0 / 3.0, 1e-14);
  EXPECT_NEAR(fit.beta_hat[1], 2.0, 1e-14);
  EXPECT_NEAR(fit.beta_hat[0], expect[0], 1e-14);
  EXPECT_NEAR(fit.residuals[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(fit.residuals[1], -2.0 / 3.0, 1e-14);
  EXPECT_NEAR(fit.residuals[2], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(fit.sigma_hat(1, 1), 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(fit.gamma_hat[1], 3.0, 1e-15);
  EXPECT_EQ(fit.n, 3u);
  EXPECT_EQ(fit.p, 2u);
}

TEST(FitOls, PerfectLinearFit) {
  Dataset d{Mat{{1, 0.5}, {1, -2}, {1, 3}, {1, 7}}, Vec(4)};
  for (std::size_t i = 0; i < 4; ++i) d.y[i] = 2.0 * d.x(i, 0) - 1.0 * d.x(i, 1);
  const OlsFit fit = fit_ols(d);
  EXPECT_NEAR(fit.beta_hat[0], 2.0, 1e-13);
  EXPECT_NEAR(fit.beta_hat[1], -1.0, 1e-13);
  EXPECT_LE(max_abs(fit.residuals), 1e-13);
}

TEST(FitOls, SquareDesignInterpolates) {
  const Dataset d{Mat{{2, 1}, {1, 3}}, Vec{5, 10}};
  const auto expect = oracle::cramer_solve({{{2, 1}, {1, 3}}}, {5, 10});
  const OlsFit fit = fit_ols(d);
  EXPECT_NEAR(fit.beta_hat[0], expect[0], 1e-13);
  EXPECT_NEAR(fit.beta_hat[1], expect[1], 1e-13);
  EXPECT_LE(max_abs(fit.residuals), 1e-13);
}

TEST(FitOls, Errors) {
  try {
    fit_ols({Mat{{1, 2}, {2, 4}, {3, 6}}, Vec{1, 2, 3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_design);
  }
  try {
    fit_ols({Mat{{1, 2}, {2, 4}}, Vec{1, 2, 3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
  try {
    fit_ols({Mat(3, 2, 1.0), Vec{1, std::nan(""), 3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}

TEST(FitOls, InvariantsOnRandomData) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 1 + static_cast<std::size_t>(t % 5);
    const std::size_t n = p + 5 + static_cast<std::size_t>(t);
    const Dataset d = random_dataset(n, p, rng);
    const OlsFit fit = fit_ols(d);

    const Vec resid = fit.sigma_hat * fit.beta_hat - fit.gamma_hat;
    EXPECT_LE(norm2(resid), 1e-8 * std::max(1.0, norm2(fit.gamma_hat)));

    const double smax = max_abs(fit.scores_hat);
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += fit.scores_hat(i, j);
      EXPECT_LE(std::abs(s), 1e-8 * static_cast<double>(n) * smax);
    }
    EXPECT_TRUE(is_symmetric(fit.sigma_hat));
    EXPECT_GE(eig_sym_extremes(fit.sigma_hat).lambda_min, 0.0);

    // beta_hat minimizes the empirical loss along every axis.
    const double base = mean_squared_loss(d, fit.beta_hat);
    for (std::size_t j = 0; j < p; ++j) {
      for (double delta : {1e-4, -1e-4}) {
        Vec b = fit.beta_hat;
        b[j] += delta;
        EXPECT_GE(mean_squared_loss(d, b), base);
      }
    }
  }
}

TEST(FitOls, AffineEquivarianceAndScale) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const Dataset d = random_dataset(40, 3, rng);
    const Vec c = oracle::random_vec(3, rng);
    Dataset shifted = d;
    shifted.y = d.y + d.x * c;
    const OlsFit a = fit_ols(d);
    const OlsFit b = fit_ols(shifted);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(b.beta_hat[j], a.beta_hat[j] + c[j],
                  1e-10 * std::max(1.0, std::abs(a.beta_hat[j] + c[j])));
    }

    Dataset scaled = d;
    scaled.y = -2.5 * d.y;
    const OlsFit s = fit_ols(scaled);
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_NEAR(s.beta_hat[j], -2.5 * a.beta_hat[j], 1e-10 * std::max(1.0, std::abs(a.beta_hat[j])));
    for (std::size_t i = 0; i < d.n(); ++i)
      EXPECT_NEAR(s.residuals[i], -2.5 * a.residuals[i], 1e-10);
  }
}

TEST(ScoresAt, Examples) {
  const Dataset d = example();
  const OlsFit fit = fit_ols(d);
  EXPECT_EQ(scores_at(d, fit.beta_hat), fit.scores_hat);

  const Mat at_zero = scores_at(d, Vec{0, 0});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(at_zero(i, j), d.x(i, j) * d.y[i]);

  // Row-wise arithmetic at beta = (0, 1): residuals (0, 0, 2).
  const Mat s = scores_at(d, Vec{0, 1});
  EXPECT_EQ(s, (Mat{{0, 0}, {0, 0}, {2, 4}}));

  EXPECT_THROW(scores_at(d, Vec{1, 2, 3}), Error);
}

TEST(TargetFromMoments, Examples) {
  const Vec g{0.3, -2.0};
  EXPECT_EQ(target_from_moments(Mat::identity(2), g), g);

  const auto expect = oracle::cramer_solve({{{1, 0.5}, {0.5, 1.0 / 3.0}}}, {1.0 / 3.0, 0.25});
  const Vec b = target_from_moments(Mat{{1, 0.5}, {0.5, 1.0 / 3.0}}, Vec{1.0 / 3.0, 0.25});
  EXPECT_NEAR(b[0], -1.0 / 6.0, 1e-14);
  EXPECT_NEAR(b[1], 1.0, 1e-14);
  EXPECT_NEAR(b[0], expect[0], 1e-14);

  const Vec z = target_from_moments(Mat{{2, 1}, {1, 2}}, Vec(2));
  EXPECT_EQ(z, Vec(2));
  EXPECT_THROW(target_from_moments(Mat{{1, 1}, {1, 1}}, g), Error);
}
