#include <gtest/gtest.h>

#include <cmath>

#include "pustat/random.hpp"
#include "pustat/stats.hpp"

namespace pustat {
namespace {

std::vector<double> normal_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = normal_quantile((i + 0.5) / n);
  return g;
}

TEST(Normal, CdfAndQuantileInverse) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(normal_cdf(-8.0), 6.22096057427178e-16, 1e-28);
  for (int i = 1; i < 10000; ++i) {
    const double p = i / 10000.0;
    ASSERT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12);
  }
  EXPECT_THROW(normal_quantile(0.0), std::domain_error);
  EXPECT_THROW(normal_quantile(1.0), std::domain_error);
}

TEST(Kolmogorov, QuantileGrid) {
  const auto g = normal_grid(1000);
  EXPECT_LE(kolmogorov_distance_normal(g), 0.5 / 1000 + 1e-8);
  const std::vector<double> zero = {0.0};
  EXPECT_DOUBLE_EQ(kolmogorov_distance_normal(zero), 0.5);
  auto shifted = g;
  for (auto& x : shifted) x += 1.0;
  EXPECT_GT(kolmogorov_distance_normal(shifted), 0.19);
  EXPECT_NEAR(kolmogorov_distance_normal(shifted), 2 * normal_cdf(0.5) - 1, 2e-3);
  EXPECT_THROW(kolmogorov_distance_normal(std::vector<double>{}), std::invalid_argument);
}

TEST(Kolmogorov, TiesHandled) {
  // All mass at 0: the jump of the empirical cdf at 0 is compared from both
  // sides.
  const std::vector<double> ties(10, 0.0);
  EXPECT_DOUBLE_EQ(kolmogorov_distance_normal(ties), 0.5);
}

TEST(Kolmogorov, SelfTestOnNormalSamples) {
  const std::size_t n = 2000;
  int below = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Stream rng(1000 + rep);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    below += kolmogorov_distance_normal(x) < 1.95 / std::sqrt(n) ? 1 : 0;
  }
  EXPECT_GE(below, 99);
}

TEST(Wasserstein, GridTranslationSymmetry) {
  const std::size_t n = 1000;
  const auto g = normal_grid(n);
  EXPECT_EQ(wasserstein1_distance_normal(g), 0.0);
  auto shifted = g;
  for (auto& x : shifted) x += 0.7;
  EXPECT_NEAR(wasserstein1_distance_normal(shifted), 0.7, 1e-6);
  auto neg = g;
  for (auto& x : neg) x = -x;
  EXPECT_LE(wasserstein1_distance_normal(neg), 2.0 / n);
}

TEST(Wasserstein, TriangleInequality) {
  Stream rng(3);
  std::vector<double> x(500);
  for (auto& v : x) v = rng.normal() * 1.3;
  const double d0 = wasserstein1_distance_normal(x);
  for (double c : {-1.0, 0.25, 2.0}) {
    auto y = x;
    for (auto& v : y) v += c;
    EXPECT_LE(std::abs(wasserstein1_distance_normal(y) - std::abs(c)), d0 + 1e-12);
  }
}

TEST(Standardize, Modes) {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  const auto z = standardize(x);
  EXPECT_NEAR(sample_mean(z), 0.0, 1e-15);
  EXPECT_NEAR(sample_variance(z), 1.0, 1e-15);
  const auto zz = standardize(z);
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(zz[i], z[i], 1e-15);
  const auto a = standardize(x, Centering::analytic, 2.0, 4.0);
  EXPECT_DOUBLE_EQ(a[3], 1.0);
  EXPECT_THROW(standardize(std::vector<double>(5, 3.0)), std::domain_error);
  EXPECT_THROW(standardize(x, Centering::analytic, 0.0, 0.0), std::domain_error);
}

TEST(Summary, MomentsAndJackknife) {
  Stream rng(5);
  std::vector<double> x(100000);
  for (auto& v : x) v = -std::log1p(-rng.uniform());
  const auto s = summarize(x);
  EXPECT_NEAR(s.mean.value, 1.0, 3 * s.mean.se);
  EXPECT_NEAR(s.variance.value, 1.0, 3 * s.variance.se);
  EXPECT_NEAR(s.skewness.value, 2.0, 3 * s.skewness.se);
  EXPECT_NEAR(s.kurtosis.value, 9.0, 3 * s.kurtosis.se);
  EXPECT_NEAR(s.median.value, std::log(2.0), 0.02);
  EXPECT_NEAR(s.mean.se, 1.0 / std::sqrt(x.size()), 0.05 / std::sqrt(x.size()));
  EXPECT_THROW(summarize(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST(Summary, MedianEvenOdd) {
  EXPECT_EQ(sample_median(std::vector<double>{3, 1, 2}), 2.0);
  EXPECT_EQ(sample_median(std::vector<double>{4, 1, 3, 2}), 2.5);
}

TEST(PowerLaw, ExactAndNoisy) {
  const std::vector<double> t = {1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double v : t) y.push_back(v * v);
  const auto f = fit_power_law(t, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-12);
  Stream rng(8);
  std::vector<double> noisy;
  for (double v : t) noisy.push_back(5.0 * v * v * v * (1.0 + 0.01 * rng.normal()));
  const auto g = fit_power_law(t, noisy);
  EXPECT_GE(g.slope, 2.9);
  EXPECT_LE(g.slope, 3.1);
  EXPECT_LE(g.slope_lo, g.slope);
  EXPECT_GE(g.slope_hi, g.slope);
  EXPECT_THROW(fit_power_law(std::vector<double>{1, 2}, std::vector<double>{1, 4}),
               std::invalid_argument);
  EXPECT_THROW(fit_power_law(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0, 4}),
               std::invalid_argument);
}

TEST(ChiSquare, PoissonFit) {
  Stream rng(2);
  std::vector<double> good(5000), bad(5000);
  for (auto& v : good) v = static_cast<double>(rng.poisson(6.0));
  for (auto& v : bad) v = static_cast<double>(rng.poisson(7.0));
  EXPECT_GT(poisson_chi_square_pvalue(good, 6.0), 1e-3);
  EXPECT_LT(poisson_chi_square_pvalue(bad, 6.0), 1e-6);
}

}  // namespace
}  // namespace pustat
