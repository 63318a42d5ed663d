#ifndef PUSTAT_BOUNDS_HPP_
#define PUSTAT_BOUNDS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pustat/chaos.hpp"
#include "pustat/estimate.hpp"

namespace pustat {

/// Berry-Esseen quantities of F = sum_n I_n(h_n). The universal constants in
/// front of B and B' are unknown and never estimated.
struct BoundReport {
  double B = 0.0;
  double B_prime = 0.0;
  Estimate sigma_sq;
  /// Keys "(n,m,r,l)" for ||h_n ⋆_r^l h_m|| and "norm4(n)" for
  /// ||h_n^2||_{L^2} = ||h_n||_{L^4}^2.
  std::map<std::string, Estimate> terms;
  std::string dominant_term;
  bool unstable = false;
};

struct BoundOptions {
  std::size_t mc_samples = 20000;
  std::size_t inner_samples = 1;
  std::uint64_t seed = 1;
};

/// `kernels` holds h_1..h_k (zero functions allowed). B is the maximum of
///   ||h_n ⋆_r^l h_n||, 1 <= r <= n, 1 <= l <= min(r, n - 1),
///   ||h_n ⋆_r^l h_m||, 1 <= l <= r <= n < m,
///   ||h_n^2||_{L^2(mu^n)},
/// and B' = max(|1 - sigma^2|, B, B^{3/2}) with sigma^2 = sum n! ||h_n||^2.
BoundReport clt_bounds(std::span<const Function> kernels, const PointMeasure& measure,
                       const BoundOptions& options = {});

struct DeJongReport {
  Estimate star20;  // ||f ⋆_2^0 f||
  Estimate star11;  // ||f ⋆_1^1 f||
  Estimate star21;  // ||f ⋆_2^1 f||
  Estimate norm_sq; // ||f||^2
  double b = 0.0;
  /// b / ||f||^2 and max(b, b^{3/2}) / ||f||^2.
  double wasserstein_form = 0.0;
  double kolmogorov_form = 0.0;
};

/// Quantities of the fourth-moment theorem for a degenerate order-2 kernel.
/// Degeneracy is checked at `check_points` draws x from mu: the partial
/// integral ∫ f(x, .) dmu must stay within tolerance + 3 se; otherwise
/// std::domain_error names the offending x.
DeJongReport dejong_b(const Kernel& f2, const PointMeasure& measure,
                      const IntegrationSpec& spec, const BoundOptions& options = {},
                      double tolerance = 1e-9, std::size_t check_points = 20);

/// E F^4 - 3 for the empirically standardized sample, with a jackknife
/// standard error. Throws std::invalid_argument below 100 samples.
Estimate fourth_moment_gap(std::span<const double> samples);

/// c_k = 4 / ((k/2)! C(k, k/2)^2).
double gamma_constant(int k);

struct GammaReport {
  double max = 0.0;
  std::map<std::string, Estimate> terms;
  std::string dominant_term;
};

/// Terms of the Gamma approximation bound for I_k(h_k), k even:
///   |k! ||h||^2 - 2 nu|, ||h ⋆_p^p h|| (p = 1..k-1, p != k/2),
///   ||h ⋆_r^l h||^{1/2} over r != l with l = 0 or 1 <= l <= min(r, k-1),
///   ||h ~⋆_{k/2}^{k/2} h - c_k h||.
/// Throws std::invalid_argument for odd k or k < 2.
GammaReport gamma_bound_terms(const Function& h, double nu, const PointMeasure& measure,
                              const BoundOptions& options = {});

enum class Regime { long_range, constant, small, rare, inconclusive };
const char* regime_name(Regime r);

struct RegimePrediction {
  double t = 0.0;
  double v_t = 0.0;
  Regime regime = Regime::inconclusive;
  /// t v^{2k-2} max(1, v^{-k+1}).
  double variance_order = 0.0;
  /// t^{-1/2} max(1, v^{-k+1})^{1/2}.
  double rate = 0.0;
  bool clt_expected = false;
  std::string diagnostics;
};

/// Classifies a (t, v_t) schedule from its last three entries. A quantity
/// is taken to grow (shrink) when each of the two last ratios exceeds 1.1
/// (falls below 1/1.1) and to be stationary when both ratios lie within
/// those limits:
///   long: v grows; constant: v stationary; small: v shrinks and t v^{k-1}
///   grows; rare: v shrinks and t v^{k-1} does not grow.
/// Any other pattern is inconclusive. Throws std::invalid_argument on
/// mismatched or nonpositive schedules or fewer than 3 entries.
std::vector<RegimePrediction> predict_regime(int k, std::span<const double> t,
                                             std::span<const double> v_t);

struct VarianceOrder {
  double order = 0.0;  // t^{2k - n1}
  bool clt_expected = false;
};
VarianceOrder geometric_variance_order(int k, int n1, double t);

}  // namespace pustat

#endif  // PUSTAT_BOUNDS_HPP_
