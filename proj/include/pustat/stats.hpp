#ifndef PUSTAT_STATS_HPP_
#define PUSTAT_STATS_HPP_

#include <optional>
#include <span>
#include <vector>

#include "pustat/estimate.hpp"

namespace pustat {

/// Standard normal distribution function, 0.5 erfc(-x / sqrt 2). Absolute
/// error is at the level of double rounding (well below 1e-8).
double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1); |normal_cdf(normal_quantile(p)) - p|
/// stays below 1e-15 in double precision.
double normal_quantile(double p);

/// sup_x |F_n(x) - Phi(x)|. Throws std::invalid_argument on an empty sample.
double kolmogorov_distance_normal(std::span<const double> samples);
/// (1/n) sum_i |x_(i) - Phi^{-1}((i - 1/2)/n)|, the quantile-grid coupling
/// approximation of W_1 to the standard normal (O(1/n) bias).
double wasserstein1_distance_normal(std::span<const double> samples);

enum class Centering { empirical, analytic };

/// (x - a)/sqrt(b). Empirical mode uses the sample mean and variance;
/// analytic mode uses the given a and b. Throws std::domain_error on zero
/// variance.
std::vector<double> standardize(std::span<const double> samples,
                                Centering centering = Centering::empirical,
                                double a = 0.0, double b = 1.0);

/// Moments with jackknife standard errors. Skewness and kurtosis are the
/// plain moment ratios m3/m2^{3/2} and m4/m2^2 (not excess).
struct SampleSummary {
  std::size_t n = 0;
  Estimate mean, variance, skewness, kurtosis, median;
};
SampleSummary summarize(std::span<const double> samples);

double sample_mean(std::span<const double> samples);
/// Unbiased sample variance.
double sample_variance(std::span<const double> samples);
double sample_median(std::span<const double> samples);

/// Least squares fit of ln y = intercept + slope ln t.
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  /// 95% confidence interval on the slope (Student t, n - 2 dof).
  double slope_lo = 0.0;
  double slope_hi = 0.0;
};
/// Throws std::invalid_argument for fewer than 3 pairs or nonpositive data.
PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> y);

/// Chi-square goodness of fit of nonnegative integer counts against a
/// Poisson law with the given mean. Bins with expected count below 5 are
/// merged into the tails. Returns the p-value.
double poisson_chi_square_pvalue(std::span<const double> counts, double mean);

}  // namespace pustat

#endif  // PUSTAT_STATS_HPP_
