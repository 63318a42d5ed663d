#ifndef PUSTAT_CHAOS_HPP_
#define PUSTAT_CHAOS_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "pustat/estimate.hpp"
#include "pustat/kernels.hpp"
#include "pustat/process.hpp"

namespace pustat {

/// Partial integrals of an order-k kernel against mu:
///   partial(x_1..x_j) = ∫ f(x_1..x_j, y_1..y_{k-j}) dmu^{k-j}(y),  0 <= j <= k.
/// With j = k it must return f itself.
using PartialFn = std::function<double(std::span<const PointView>)>;

/// Caller-supplied closed form for the partial integrals of the parent kernel.
struct ClosedForm {
  PartialFn partial;
};
/// Plain Monte Carlo with `samples` draws per evaluation point. The draws
/// are keyed by the seed and the evaluation point, so evaluation is pure.
struct MonteCarlo {
  std::size_t samples = 4096;
  std::uint64_t seed = 1;
};
/// Tensor composite Gauss-Legendre rule (5 nodes per panel and axis). Box
/// windows and unmarked measures only.
struct Quadrature {
  int panels = 4;
};
using IntegrationSpec = std::variant<ClosedForm, MonteCarlo, Quadrature>;

/// A real function on n-tuples that can be evaluated exactly or estimated
/// without bias. Products of independent estimates are unbiased for the
/// product of the values, which is what the norm and contraction
/// estimators rely on.
class Function {
 public:
  using Sampler = std::function<double(std::span<const PointView>, Stream&)>;

  Function(int arity, Sampler sampler, bool exact);
  static Function zero(int arity);

  int arity() const noexcept { return arity_; }
  bool exact() const noexcept { return exact_; }
  /// Exact value, or one unbiased estimate drawn from `rng`.
  double operator()(std::span<const PointView> x, Stream& rng) const {
    return sampler_(x, rng);
  }
  Function scaled(double c) const;

 private:
  int arity_;
  Sampler sampler_;
  bool exact_;
};

/// h_n(x_n) = C(k, n) ∫ f(x_n, y_{k-n}) dmu^{k-n}(y), the n-th kernel of the
/// chaos decomposition of U(f; eta).
class ChaosKernel {
 public:
  ChaosKernel(Kernel parent, int n, PointMeasure measure, IntegrationSpec spec);

  int order() const noexcept { return n_; }
  int parent_order() const noexcept { return parent_.order(); }
  const Kernel& parent() const noexcept { return parent_; }
  const PointMeasure& measure() const noexcept { return measure_; }
  const IntegrationSpec& integration() const noexcept { return spec_; }
  /// C(k, n).
  double coefficient() const noexcept { return coefficient_; }

  /// ∫ h_n(x_1..x_j, y) dmu^{n-j}(y) for j = x.size() <= n. The value is
  /// exact (se = 0) for closed forms and quadrature.
  Estimate partial(std::span<const PointView> x) const;
  /// h_n(x); x.size() must equal n.
  Estimate operator()(std::span<const PointView> x) const;

  /// h_n as an unbiased-estimate function. For the Monte Carlo evaluator
  /// each call averages a fresh batch of `samples` inner draws.
  Function function() const;

 private:
  // ∫ f(x, y) dmu^{k-j}(y) with j = x.size().
  Estimate parent_partial(std::span<const PointView> x) const;

  Kernel parent_;
  int n_;
  PointMeasure measure_;
  IntegrationSpec spec_;
  double coefficient_;
};

/// Throws std::invalid_argument if n is outside [0, k] or the integration
/// rule does not support the measure.
ChaosKernel chaos_kernel(const Kernel& f, int n, const PointMeasure& measure,
                         const IntegrationSpec& spec);
/// h_1..h_k.
std::vector<ChaosKernel> chaos_kernels(const Kernel& f, const PointMeasure& measure,
                                       const IntegrationSpec& spec);

/// ∫ |h|^p dmu^n for p = 2 or 4 by Monte Carlo over x; the p-th power of a
/// Monte Carlo evaluator is replaced by a product of p independent
/// estimates, so the result is unbiased.
Estimate kernel_moment(const Function& h, const PointMeasure& measure, int p,
                       std::size_t mc_samples, std::uint64_t seed);
/// ||h_n||^2 = ∫ h_n^2 dmu^n (mass factor included).
Estimate kernel_norm_sq(const ChaosKernel& h, std::size_t mc_samples,
                        std::uint64_t seed);
Estimate kernel_norm_sq(const Function& h, const PointMeasure& measure,
                        std::size_t mc_samples, std::uint64_t seed);

struct ChaosVariance {
  Estimate total;
  /// n! ||h_n||^2 for n = 1..k.
  std::vector<Estimate> terms;
};
/// Var U = sum_{n=1}^k n! ||h_n||^2.
ChaosVariance variance_chaos(const Kernel& f, const PointMeasure& measure,
                             const IntegrationSpec& spec, std::size_t mc_samples,
                             std::uint64_t seed);

/// I_n(h; eta) = sum_{l=0}^n (-1)^{n-l} C(n,l) sum_{x in eta^l_≠} P(x),
/// where P(x_1..x_l) = ∫ h(x_1..x_l, y) dmu^{n-l}(y).
double multiple_integral(int n, const PartialFn& partial,
                         const PointConfiguration& config);
double multiple_integral(const ChaosKernel& h, const PointConfiguration& config);

/// One component H_m of the Hoeffding decomposition against a probability
/// measure: H_m(x_m) = sum over subsets S of {1..m} of
/// (-1)^{m-|S|} C(k,|S|)^{-1} h_{|S|}(x_S).
class HoeffdingComponent {
 public:
  HoeffdingComponent(int m, Kernel parent, PointMeasure measure,
                     IntegrationSpec spec);
  int order() const noexcept { return m_; }
  double operator()(std::span<const PointView> x) const;
  /// ∫ H_m(x_1..x_{m-1}, y) dmu(y), integrated over y with the same rule
  /// (Gauss-Legendre for closed forms and quadrature, Monte Carlo
  /// otherwise). Vanishes for a completely degenerate component.
  Estimate integrate_last(std::span<const PointView> x) const;

 private:
  int m_;
  std::vector<ChaosKernel> h_;  // h_0..h_m
  double mean_ = 0.0;           // h_0
  PointMeasure measure_;
  IntegrationSpec spec_;
};

/// H_0..H_k. Throws std::invalid_argument unless mu has total mass 1.
std::vector<HoeffdingComponent> hoeffding_components(const Kernel& f,
                                                     const PointMeasure& measure,
                                                     const IntegrationSpec& spec);

struct HoeffdingRank {
  int rank = 0;
  double tolerance = 0.0;
  /// ||h_n||^2 for n = 1..k (as far as computed).
  std::vector<Estimate> norms_sq;
};
/// Smallest n >= 1 with ||h_n||^2 > tolerance + 3 se. Throws
/// std::domain_error("rank undetermined (> k)") when there is none.
HoeffdingRank hoeffding_rank(const Kernel& f, const PointMeasure& measure,
                             double tolerance, const IntegrationSpec& spec,
                             std::size_t mc_samples, std::uint64_t seed);

/// f ⋆_r^l g with f of order q and g of order k: r arguments shared, l of
/// them integrated,
///   (x_{r-l}, y_{q-r}, z_{k-r}) -> ∫ f(w_l, x, y) g(w_l, x, z) dmu^l(w).
/// Arity q + k - r - l. Each call averages `inner_samples` draws of w.
/// Throws std::invalid_argument unless 0 <= l <= r <= min(q, k), r >= 1.
Function contraction(const Function& f, const Function& g, int r, int l,
                     const PointMeasure& measure, std::size_t inner_samples = 1);
/// Average of a function over all permutations of its arguments (arity <= 8).
Function symmetrize(const Function& f);
/// a f + b g (same arity).
Function combine(double a, const Function& f, double b, const Function& g);

/// ||h||_{L^2(mu^n)} with standard error by the delta method.
Estimate l2_norm(const Function& h, const PointMeasure& measure,
                 std::size_t mc_samples, std::uint64_t seed);
/// ||f ⋆_r^l g||, nested Monte Carlo: `mc_samples` outer points, each with
/// two independent inner estimates multiplied for the square.
Estimate contraction_norm(const Function& f, const Function& g, int r, int l,
                          const PointMeasure& measure, std::size_t mc_samples,
                          std::uint64_t seed, std::size_t inner_samples = 1);

/// ∫ D_xF (-D_x L^{-1} F) mu(dx) for F = sum_n I_n(h_n) on one
/// configuration, with D_xF = sum_n n I_{n-1}(h_n(x, .)) and
/// -D_x L^{-1} F = sum_n I_{n-1}(h_n(x, .)). `kernels` holds h_1..h_k with
/// exact partials; the x-integral is Monte Carlo with `mc_points` draws.
Estimate malliavin_pairing(std::span<const ChaosKernel> kernels,
                           const PointConfiguration& config, std::size_t mc_points,
                           std::uint64_t seed);

/// Closed-form partial integrals for kernels used in tests and examples.
namespace analytic {
/// f ≡ 1 of order k against a measure of total mass `mass`.
PartialFn constant(int k, double mass);
/// Gilbert kernel on the 1D torus [0, L) with mu = t * Lebesgue.
PartialFn torus_gilbert(double delta, double period, double t);
/// f(x, y) = g(x) g(y) with ∫ g dmu = integral_g.
PartialFn product(std::function<double(const PointView&)> g, double integral_g);
}  // namespace analytic

}  // namespace pustat

#endif  // PUSTAT_CHAOS_HPP_
