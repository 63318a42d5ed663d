#include "pustat/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pustat/stats.hpp"

namespace pustat {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

}  // namespace

double ldi_general(double u, double m, double B, int k, double epsilon_B) {
  require_positive(u, "u");
  require_positive(m, "median");
  require_positive(B, "B");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(epsilon_B >= 0.0 && epsilon_B <= 1.0)) {
    throw std::invalid_argument("epsilon(B) must lie in [0, 1]");
  }
  const double kk = static_cast<double>(k) * k;
  return 4.0 * std::exp(-u * u / (4.0 * kk * B * (u + m))) + 3.0 * epsilon_B;
}

double ldi_g(double v) { return (1.0 + v) * std::log1p(v) - v; }

double ldi_first_order(double u, double l1_norm, double sup_norm) {
  require_positive(l1_norm, "L1 norm");
  require_positive(sup_norm, "sup norm");
  if (!(u >= 0.0)) throw std::invalid_argument("u must be >= 0");
  return std::exp(-(l1_norm / sup_norm) * ldi_g(u / l1_norm));
}

BoundValue ldi_local(double u, double m, int k, double sup_norm, double E,
                     double total_mass) {
  require_positive(u, "u");
  require_positive(m, "median");
  require_positive(sup_norm, "sup norm");
  require_positive(E, "E");
  require_positive(total_mass, "total mass");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const double ratio = u * u / (u + m);
  BoundValue out;
  out.valid = ratio >= std::pow(E, k) * std::exp(2.0 * k) * sup_norm;
  const double kk = static_cast<double>(k) * k;
  out.value = 4.0 * total_mass *
              std::exp(-(1.0 / (4.0 * kk)) * std::pow(sup_norm, -1.0 / k) *
                       std::pow(ratio, 1.0 / k));
  return out;
}

double local_epsilon(double B, double sup_norm, int k, double total_mass) {
  require_positive(B, "B");
  require_positive(sup_norm, "sup norm");
  require_positive(total_mass, "total mass");
  if (k < 2) throw std::invalid_argument("local_epsilon needs k >= 2");
  return total_mass * std::exp(-0.5 * std::pow(B / sup_norm, 1.0 / (k - 1)));
}

PoissonTail poisson_tail_bound(double E, double r) {
  require_positive(E, "E");
  require_positive(r, "r");
  PoissonTail out;
  if (r > E) out.chernoff = std::exp(r * (1.0 - std::log(r / E)) - E);
  out.simplified_valid = r >= E * std::exp(2.0);
  out.simplified = std::exp(-0.5 * r);
  return out;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n,
                                          double z) {
  if (n == 0) throw std::invalid_argument("wilson_interval needs n > 0");
  if (successes > n) throw std::invalid_argument("wilson_interval: successes > n");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

LDIReport empirical_tail_check(std::span<const double> samples,
                               std::span<const double> u_grid,
                               const TailBoundFn& bound, TailMode mode,
                               double center) {
  if (samples.size() < 1000) {
    throw std::invalid_argument("empirical_tail_check needs at least 1000 samples");
  }
  LDIReport report;
  report.n = samples.size();
  report.mode = mode;
  report.median = sample_median(samples);
  report.center = mode == TailMode::two_sided_median ? report.median : center;
  for (double u : u_grid) {
    std::size_t hits = 0;
    for (double x : samples) {
      const double dev = x - report.center;
      if (mode == TailMode::two_sided_median ? std::abs(dev) >= u : dev >= u) ++hits;
    }
    TailRow row;
    row.u = u;
    row.empirical = static_cast<double>(hits) / static_cast<double>(samples.size());
    std::tie(row.wilson_lo, row.wilson_hi) = wilson_interval(hits, samples.size());
    const BoundValue b = bound(u, report.center);
    row.bound = b.value;
    row.bound_reported = std::min(b.value, 1.0);
    row.valid = b.valid;
    row.certified = b.valid && row.wilson_hi <= b.value;
    row.violation = b.valid && row.wilson_lo > b.value;
    if (row.violation) ++report.violations;
    if (b.valid && !row.certified) ++report.uncertified;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace pustat
