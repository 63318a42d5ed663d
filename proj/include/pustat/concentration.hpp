#ifndef PUSTAT_CONCENTRATION_HPP_
#define PUSTAT_CONCENTRATION_HPP_

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace pustat {

struct BoundValue {
  double value = 1.0;
  /// False where a precondition of the inequality fails.
  bool valid = true;
};

/// 4 exp(-u^2 / (4 k^2 B (u + m))) + 3 eps, a bound on P(|U - m| >= u)
/// around the median m. Throws std::invalid_argument on nonpositive u, m,
/// B, k or eps outside [0, 1].
double ldi_general(double u, double m, double B, int k, double epsilon_B);

/// exp(-(l1 / sup) g(u / l1)) with g(v) = (1 + v) ln(1 + v) - v, a bound on
/// P(F - E F >= u) for a first-order functional F = sum_x f(x).
double ldi_first_order(double u, double l1_norm, double sup_norm);
/// g(v) = (1 + v) ln(1 + v) - v.
double ldi_g(double v);

/// Local kernels: bound 4 T exp(-(1/(4k^2)) sup^{-1/k} (u^2/(u+m))^{1/k}),
/// valid when u^2/(u+m) >= E^k e^{2k} sup.
BoundValue ldi_local(double u, double m, int k, double sup_norm, double E,
                     double total_mass);
/// T exp(-(1/2) (B / sup)^{1/(k-1)}), the exceptional probability for a
/// local bound B (k >= 2).
double local_epsilon(double B, double sup_norm, int k, double total_mass);

struct PoissonTail {
  /// exp(r (1 - ln(r / E)) - E) for r > E, else 1.
  double chernoff = 1.0;
  /// exp(-r / 2), valid when r >= E e^2.
  double simplified = 1.0;
  bool simplified_valid = false;
};
/// Chernoff bound on P(Poisson(E) >= r).
PoissonTail poisson_tail_bound(double E, double r);

/// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n,
                                          double z = 2.5758293035489004);

enum class TailMode {
  /// P(|X - median| >= u).
  two_sided_median,
  /// P(X - center >= u) with a caller-supplied center.
  upper_from_center,
};

struct TailRow {
  double u = 0.0;
  double empirical = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  /// Raw bound value (may exceed 1).
  double bound = 0.0;
  /// min(bound, 1), for display.
  double bound_reported = 0.0;
  bool valid = true;
  /// Upper Wilson limit at or below the bound.
  bool certified = true;
  /// Lower Wilson limit above the bound: the sample contradicts it.
  bool violation = false;
};

struct LDIReport {
  double median = 0.0;
  double center = 0.0;
  TailMode mode = TailMode::two_sided_median;
  std::size_t n = 0;
  std::vector<TailRow> rows;
  int violations = 0;
  /// Valid rows that are not certified (upper limit above the bound).
  int uncertified = 0;
};

/// bound(u, center) for the tail at distance u from the center.
using TailBoundFn = std::function<BoundValue(double u, double center)>;

/// Empirical tails with Wilson 99% intervals compared against a bound, on
/// the rows where the bound is valid: `certified` when the whole interval
/// lies at or below the bound, a violation when the whole interval lies
/// above it. Throws std::invalid_argument below 1000 samples.
LDIReport empirical_tail_check(std::span<const double> samples,
                               std::span<const double> u_grid,
                               const TailBoundFn& bound,
                               TailMode mode = TailMode::two_sided_median,
                               double center = 0.0);

}  // namespace pustat

#endif  // PUSTAT_CONCENTRATION_HPP_
