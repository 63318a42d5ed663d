#include "pustat/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace pustat {

namespace {
constexpr std::size_t kCheckpoints = 10;
constexpr std::size_t kMinForCheck = 100;
}  // namespace

RunningEstimate::RunningEstimate(std::size_t expected_count)
    : expected_(std::max<std::size_t>(expected_count, 1)) {
  checkpoints_.reserve(kCheckpoints + 1);
}

void RunningEstimate::add(double x) {
  if (!std::isfinite(x)) {
    non_finite_ = true;
    return;
  }
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
  sum_abs_ += std::abs(x);
  max_abs_ = std::max(max_abs_, std::abs(x));
  // Checkpoints at n/2 + j * n / (2 * kCheckpoints), j = 0..kCheckpoints-1.
  const std::size_t half = expected_ / 2;
  if (n_ >= half && half > 0) {
    const std::size_t step = std::max<std::size_t>(half / kCheckpoints, 1);
    if ((n_ - half) % step == 0) checkpoints_.push_back(mean_);
  }
}

Estimate RunningEstimate::finish(double scale) const {
  Estimate e;
  if (n_ == 0) {
    e.unstable = non_finite_;
    return e;
  }
  const double n = static_cast<double>(n_);
  const double mean = mean_;
  const double var = n_ > 1 ? std::max(m2_ / (n - 1.0), 0.0) : 0.0;
  const double se = std::sqrt(var / n);
  e.value = scale * mean;
  e.se = std::abs(scale) * se;

  bool unstable = non_finite_;
  if (n_ >= kMinForCheck) {
    if (sum_abs_ > 0.0 && max_abs_ > 0.2 * sum_abs_) unstable = true;
    if (!checkpoints_.empty()) {
      double lo = mean, hi = mean;
      for (double c : checkpoints_) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      const double spread = hi - lo;
      if (spread > 0.1 * std::abs(mean) && spread > 6.0 * se) unstable = true;
    }
  }
  e.unstable = unstable;
  return e;
}

}  // namespace pustat
