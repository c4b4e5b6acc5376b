#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "leanreg/error.hpp"
#include "leanreg/testing.hpp"
#include "oracles.hpp"

using namespace leanreg;

namespace {

Dataset noisy(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0, 1);
  Dataset d{Mat(n, 3), Vec(n)};
  for (std::size_t i = 0; i < n; ++i) {
    d.x(i, 0) = 1.0;
    d.x(i, 1) = u(rng);
    d.x(i, 2) = z(rng);
    d.y[i] = 0.5 + d.x(i, 1) + (0.3 + d.x(i, 1)) * z(rng);
  }
  return d;
}

}  // namespace

TEST(TTest, NullAtEstimateGivesPOne) {
  const OlsFit fit = fit_ols(noisy(80, 1));
  const auto var = sandwich_avar(fit);
  for (auto ref : {Reference::std_normal, Reference::student_t}) {
    const auto r = t_test(fit, var, 1, fit.beta_hat[1], ref);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
    EXPECT_TRUE(r.conservative);
    EXPECT_EQ(r.target_coord, 1u);
  }
}

TEST(TTest, NormalTailAgainstErfc) {
  EXPECT_NEAR(normal_two_sided_p(1.959964), 0.05, 1e-4);
  for (double t : {0.1, 0.7, 1.5, 2.5, 4.0, -3.0}) {
    EXPECT_NEAR(normal_two_sided_p(t), oracle::normal_two_sided(t), 1e-13);
  }
}

TEST(TTest, StatisticDefinition) {
  const OlsFit fit = fit_ols(noisy(120, 2));
  const auto var = sandwich_avar(fit);
  const auto r = t_test(fit, var, 2, 0.1);
  const double expect = std::sqrt(120.0) * (fit.beta_hat[2] - 0.1) / std::sqrt(var.avar(2, 2));
  EXPECT_NEAR(r.statistic, expect, 1e-12);
  EXPECT_NEAR(r.p_value, oracle::normal_two_sided(expect), 1e-12);
}

TEST(TTest, StudentTIsMoreConservative) {
  for (double df : {1.0, 2.0, 5.0, 30.0, 1000.0}) {
    for (double t : {0.5, 1.0, 1.96, 3.0, 6.0}) {
      EXPECT_GE(student_t_two_sided_p(t, df), normal_two_sided_p(t));
    }
  }
  const OlsFit fit = fit_ols(noisy(30, 3));
  const auto var = sandwich_avar(fit);
  const auto t = t_test(fit, var, 1, 0.0, Reference::student_t);
  const auto z = t_test(fit, var, 1, 0.0, Reference::std_normal);
  EXPECT_DOUBLE_EQ(t.df, 27.0);
  EXPECT_GE(t.p_value, z.p_value);
}

TEST(TTest, Errors) {
  const OlsFit fit = fit_ols(noisy(40, 4));
  const auto var = sandwich_avar(fit);
  try {
    t_test(fit, var, 3, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::bad_coordinate);
  }
  EXPECT_THROW(t_test(fit, var, 0, 0.0, Reference::bootstrap), Error);

  const OlsFit perfect = fit_ols({Mat{{1, 0}, {1, 1}, {1, 2}}, Vec{1, 2, 3}});
  try {
    t_test(perfect, sandwich_avar(perfect), 0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::zero_variance);
  }
}

TEST(TTest, PValueMonotoneInStatistic) {
  double last = 1.0;
  for (double t = 0.0; t < 8.0; t += 0.05) {
    const double p = normal_two_sided_p(t);
    EXPECT_LE(p, last);
    last = p;
  }
}

TEST(TTest, ColumnRescalingLeavesStatisticUnchanged) {
  Dataset d = noisy(150, 5);
  const OlsFit fit = fit_ols(d);
  const auto r = t_test(fit, sandwich_avar(fit), 1, 0.4);
  for (double s : {-3.0, 0.01, 250.0}) {
    Dataset scaled = d;
    for (std::size_t i = 0; i < d.n(); ++i) scaled.x(i, 1) *= s;
    const OlsFit f2 = fit_ols(scaled);
    const auto r2 = t_test(f2, sandwich_avar(f2), 1, 0.4 / s);
    EXPECT_NEAR(std::abs(r2.statistic), std::abs(r.statistic), 1e-10 * std::max(1.0, std::abs(r.statistic)));
  }
}

TEST(MaxTTest, NullAtEstimate) {
  const OlsFit fit = fit_ols(noisy(60, 6));
  const auto var = sandwich_avar(fit);
  BootstrapOptions o;
  o.b = 200;
  const auto draws = run_bootstrap(fit, o);
  for (auto ref : {Reference::std_normal, Reference::student_t, Reference::bootstrap}) {
    const auto r = max_t_test(fit, var, fit.beta_hat, ref, &draws);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  }
}

TEST(MaxTTest, SingleCoordinateReducesToT) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  Dataset d{Mat(50, 1), Vec(50)};
  for (std::size_t i = 0; i < 50; ++i) {
    d.x(i, 0) = 1.0 + z(rng) * 0.1;
    d.y[i] = 2.0 * d.x(i, 0) + z(rng);
  }
  const OlsFit fit = fit_ols(d);
  const auto var = sandwich_avar(fit);
  const auto t = t_test(fit, var, 0, 1.7);
  const auto m = max_t_test(fit, var, Vec{1.7});
  EXPECT_DOUBLE_EQ(m.statistic, std::abs(t.statistic));
  EXPECT_DOUBLE_EQ(m.p_value, t.p_value);
}

TEST(MaxTTest, BonferroniAndBootstrapBounds) {
  const OlsFit fit = fit_ols(noisy(100, 8));
  const auto var = sandwich_avar(fit);
  const Vec null{0.0, 0.0, 0.0};
  const auto r = max_t_test(fit, var, null);
  EXPECT_NEAR(r.p_value, std::min(1.0, 3.0 * oracle::normal_two_sided(r.statistic)), 1e-12);

  BootstrapOptions o;
  o.b = 199;
  o.seed = 2;
  const auto draws = run_bootstrap(fit, o);
  const auto b = max_t_test(fit, var, null, Reference::bootstrap, &draws);
  EXPECT_GE(b.p_value, 1.0 / 200.0);
  EXPECT_LE(b.p_value, 1.0);
  EXPECT_EQ(b.b, 199u);

  // Bootstrap p-values are non-increasing in the statistic.
  double last = 1.0;
  for (double shift = 0.0; shift < 2.0; shift += 0.1) {
    const Vec n2{fit.beta_hat[0], fit.beta_hat[1] - shift, fit.beta_hat[2]};
    const double p = max_t_test(fit, var, n2, Reference::bootstrap, &draws).p_value;
    EXPECT_LE(p, last);
    last = p;
  }
}
