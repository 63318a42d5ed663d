#ifndef PUSTAT_ESTIMATE_HPP_
#define PUSTAT_ESTIMATE_HPP_

#include <cstddef>
#include <vector>

namespace pustat {

/// A Monte Carlo (or exact, se = 0) estimate.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
  /// Set when the running estimate failed the stability check.
  bool unstable = false;
};

/// Accumulates i.i.d. terms and produces their mean with a standard error.
///
/// Stability check, applied when at least 100 terms were added:
///   - any non-finite term, or
///   - a single term carries more than 20% of sum |x_i| (the sum is driven
///     by one draw, as happens for integrands without a finite mean), or
///   - the running mean drifts over the second half of the terms by more
///     than 10% of the final value and by more than 6 standard errors.
class RunningEstimate {
 public:
  /// `expected_count` places the checkpoints used by the drift test.
  explicit RunningEstimate(std::size_t expected_count);

  void add(double x);
  std::size_t count() const noexcept { return n_; }
  /// Mean of the terms times `scale` (se scaled accordingly).
  Estimate finish(double scale = 1.0) const;

 private:
  std::size_t expected_;
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double sum_abs_ = 0.0;
  double max_abs_ = 0.0;
  bool non_finite_ = false;
  std::vector<double> checkpoints_;
};

}  // namespace pustat

#endif  // PUSTAT_ESTIMATE_HPP_
