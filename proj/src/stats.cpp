#include "pustat/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pustat {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace {

std::vector<double> sorted_copy(std::span<const double> samples) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  return s;
}

double jackknife_se(const std::vector<double>& leave_one_out) {
  const double n = static_cast<double>(leave_one_out.size());
  double mean = 0.0;
  for (double v : leave_one_out) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : leave_one_out) ss += (v - mean) * (v - mean);
  return std::sqrt((n - 1.0) / n * ss);
}

struct Moments {
  double mean, var, skew, kurt;
};

// Moments of a sample given by power sums of values pre-centered at `shift`.
Moments moments_from_sums(double n, double s1, double s2, double s3, double s4,
                          double shift) {
  const double m = s1 / n;
  const double r2 = s2 / n, r3 = s3 / n, r4 = s4 / n;
  const double m2 = std::max(r2 - m * m, 0.0);
  const double m3 = r3 - 3.0 * m * r2 + 2.0 * m * m * m;
  const double m4 = r4 - 4.0 * m * r3 + 6.0 * m * m * r2 - 3.0 * m * m * m * m;
  Moments out;
  out.mean = shift + m;
  out.var = m2 * n / (n - 1.0);
  out.skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  out.kurt = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
  return out;
}

double median_of_sorted(const std::vector<double>& s, std::size_t skip) {
  // Median of s with element `skip` removed (skip == s.size(): none removed).
  const std::size_t n = skip < s.size() ? s.size() - 1 : s.size();
  auto at = [&](std::size_t r) { return r < skip ? s[r] : s[r + (skip < s.size())]; };
  if (n % 2 == 1) return at(n / 2);
  return 0.5 * (at(n / 2 - 1) + at(n / 2));
}

}  // namespace

double kolmogorov_distance_normal(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("KS distance of an empty sample");
  const auto s = sorted_copy(samples);
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  // With ties the empirical CDF jumps once per distinct value: compare the
  // level just below the first copy and at the last copy.
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1] == s[i]) ++j;
    const double phi = normal_cdf(s[i]);
    d = std::max(d, std::abs(static_cast<double>(i) / n - phi));
    d = std::max(d, std::abs(static_cast<double>(j + 1) / n - phi));
    i = j + 1;
  }
  return d;
}

double wasserstein1_distance_normal(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("W1 distance of an empty sample");
  const auto s = sorted_copy(samples);
  const double n = static_cast<double>(s.size());
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    total += std::abs(s[i] - normal_quantile((static_cast<double>(i) + 0.5) / n));
  }
  return total / n;
}

double sample_mean(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("mean of an empty sample");
  double m = 0.0;
  std::size_t i = 0;
  for (double v : samples) m += (v - m) / static_cast<double>(++i);
  return m;
}

double sample_variance(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("variance needs n >= 2");
  const double m = sample_mean(samples);
  double ss = 0.0;
  for (double v : samples) ss += (v - m) * (v - m);
  return ss / static_cast<double>(samples.size() - 1);
}

double sample_median(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("median of an empty sample");
  const auto s = sorted_copy(samples);
  return median_of_sorted(s, s.size());
}

std::vector<double> standardize(std::span<const double> samples,
                                Centering centering, double a, double b) {
  if (centering == Centering::empirical) {
    a = sample_mean(samples);
    b = sample_variance(samples);
  }
  if (!(b > 0.0)) throw std::domain_error("standardize: zero variance");
  const double s = std::sqrt(b);
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = (samples[i] - a) / s;
  return out;
}

SampleSummary summarize(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 3) throw std::invalid_argument("summarize needs n >= 3");
  const double shift = sample_mean(samples);
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (double v : samples) {
    const double d = v - shift;
    s1 += d;
    s2 += d * d;
    s3 += d * d * d;
    s4 += d * d * d * d;
  }
  const double nd = static_cast<double>(n);
  const Moments full = moments_from_sums(nd, s1, s2, s3, s4, shift);
  std::vector<double> var(n), skew(n), kurt(n), med(n);
  const auto sorted = sorted_copy(samples);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = samples[i] - shift;
    const Moments m = moments_from_sums(nd - 1.0, s1 - d, s2 - d * d,
                                        s3 - d * d * d, s4 - d * d * d * d, shift);
    var[i] = m.var;
    skew[i] = m.skew;
    kurt[i] = m.kurt;
    med[i] = median_of_sorted(sorted, i);
  }
  SampleSummary out;
  out.n = n;
  out.mean = {full.mean, std::sqrt(full.var / nd), false};
  out.variance = {full.var, jackknife_se(var), false};
  out.skewness = {full.skew, jackknife_se(skew), false};
  out.kurtosis = {full.kurt, jackknife_se(kurt), false};
  out.median = {median_of_sorted(sorted, n), jackknife_se(med), false};
  return out;
}

PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  const std::size_t n = t.size();
  if (n < 3) throw std::invalid_argument("fit_power_law needs at least 3 pairs");
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(t[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("fit_power_law needs positive data");
    }
    lx[i] = std::log(t[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = sample_mean(lx);
  const double my = sample_mean(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: all t equal");
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    rss += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  fit.slope_se = std::sqrt(rss / dof / sxx);
  const double q =
      boost::math::quantile(boost::math::students_t_distribution<double>(dof), 0.975);
  fit.slope_lo = fit.slope - q * fit.slope_se;
  fit.slope_hi = fit.slope + q * fit.slope_se;
  return fit;
}

double poisson_chi_square_pvalue(std::span<const double> counts, double mean) {
  if (counts.empty()) throw std::invalid_argument("chi-square of an empty sample");
  if (!(mean > 0.0)) throw std::invalid_argument("chi-square needs a positive mean");
  const boost::math::poisson_distribution<double> law(mean);
  const double total = static_cast<double>(counts.size());
  double max_count = 0.0;
  for (double c : counts) max_count = std::max(max_count, c);
  const auto top = static_cast<std::size_t>(max_count);
  std::vector<double> observed(top + 2, 0.0);
  for (double c : counts) observed[static_cast<std::size_t>(c)] += 1.0;

  // Consecutive bins closed once their expected count reaches 5; whatever
  // is left, including the mass above the largest observation, forms the
  // last bin.
  std::vector<double> obs_bins, exp_bins;
  double o = 0.0, e = 0.0, expected_closed = 0.0;
  for (std::size_t j = 0; j <= top; ++j) {
    o += observed[j];
    e += total * boost::math::pdf(law, static_cast<double>(j));
    if (e >= 5.0) {
      obs_bins.push_back(o);
      exp_bins.push_back(e);
      expected_closed += e;
      o = e = 0.0;
    }
  }
  const double rest = total - expected_closed;
  if (rest >= 5.0 || exp_bins.empty()) {
    obs_bins.push_back(o);
    exp_bins.push_back(rest);
  } else {
    obs_bins.back() += o;
    exp_bins.back() += rest;
  }
  if (exp_bins.size() < 2) return 1.0;
  double stat = 0.0;
  for (std::size_t b = 0; b < exp_bins.size(); ++b) {
    const double d = obs_bins[b] - exp_bins[b];
    stat += d * d / exp_bins[b];
  }
  const boost::math::chi_squared_distribution<double> chi(
      static_cast<double>(exp_bins.size() - 1));
  return boost::math::cdf(boost::math::complement(chi, stat));
}

}  // namespace pustat
