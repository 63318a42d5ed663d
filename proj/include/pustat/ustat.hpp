#ifndef PUSTAT_USTAT_HPP_
#define PUSTAT_USTAT_HPP_

#include <cstdint>
#include <optional>

#include "pustat/estimate.hpp"
#include "pustat/kernels.hpp"
#include "pustat/process.hpp"

namespace pustat {

enum class EvalMode { naive, grid };

struct EvaluationReport {
  double value = 0.0;
  /// Number of ordered tuples on which the kernel was evaluated.
  std::uint64_t tuple_count = 0;
  EvalMode mode = EvalMode::naive;
  /// max_x F(x; eta), the largest sum over tuples starting at one point.
  std::optional<double> local_max;
};

/// U(f; eta): sum of the kernel over all ordered k-tuples of distinct points.
///
/// Tuples are visited in lexicographic index order in both modes. The grid
/// mode buckets points into cells of side locality_radius and only skips
/// tuples on which the kernel vanishes, so the two modes add the same
/// nonzero terms in the same order and agree bit for bit.
///
/// Throws std::invalid_argument on a domain mismatch or when grid mode is
/// requested for a kernel without a locality radius.
EvaluationReport evaluate(const Kernel& kernel, const PointConfiguration& config,
                          EvalMode mode = EvalMode::naive);
/// Flat configurations are always enumerated naively.
EvaluationReport evaluate(const Kernel& kernel, const FlatConfiguration& config,
                          EvalMode mode = EvalMode::naive);

/// Grid mode when the kernel is local, naive otherwise.
EvalMode preferred_mode(const Kernel& kernel);

/// Monte Carlo value of E U(f; eta) = ∫ f dmu_t^k: k i.i.d. draws from the
/// normalized intensity, scaled by (total mass)^k.
Estimate mecke_expectation(const Kernel& kernel, const IntensitySpec& intensity,
                           const Window& window, std::size_t mc_samples,
                           std::uint64_t seed);

/// max over points x of F(x; eta) = sum of f(x, .) over ordered (k-1)-tuples
/// of the other points. 0 for an empty configuration.
double local_sum_max(const Kernel& kernel, const PointConfiguration& config);
double local_sum_max(const Kernel& kernel, const FlatConfiguration& config);

}  // namespace pustat

#endif  // PUSTAT_USTAT_HPP_
