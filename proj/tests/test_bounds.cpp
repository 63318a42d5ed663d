#include <gtest/gtest.h>

#include <cmath>

#include "pustat/bounds.hpp"
#include "pustat/chaos.hpp"
#include "pustat/kernels.hpp"

namespace pustat {
namespace {

const Window kUnit1 = Window::box(1, 0.5, {0.5});

Function constant_fn(int arity, double c) {
  return Function(arity, [c](std::span<const PointView>, Stream&) { return c; }, true);
}

TEST(CltBounds, StandardizedPoissonCount) {
  for (double t : {4.0, 64.0}) {
    const PointMeasure mu(kUnit1, t);
    const Function h[] = {constant_fn(1, 1.0 / std::sqrt(t))};
    const auto b = clt_bounds(h, mu, {.mc_samples = 100});
    EXPECT_NEAR(b.B, 1.0 / std::sqrt(t), 1e-12);
    EXPECT_NEAR(b.sigma_sq.value, 1.0, 1e-12);
    EXPECT_EQ(b.terms.size(), 1u);
    EXPECT_EQ(b.dominant_term, "norm4(1)");
  }
}

TEST(CltBounds, AllZero) {
  const PointMeasure mu(kUnit1, 3.0);
  const Function h[] = {Function::zero(1), Function::zero(2)};
  const auto b = clt_bounds(h, mu, {.mc_samples = 100});
  EXPECT_EQ(b.B, 0.0);
  EXPECT_EQ(b.B_prime, 1.0);
}

TEST(CltBounds, InternalConsistency) {
  const double t = 50.0;
  const PointMeasure mu(Window::unit_cube(2), t);
  const auto hs = chaos_kernels(make_kernel(GilbertSpec{0.1}), mu, MonteCarlo{64, 3});
  const auto var = variance_chaos(make_kernel(GilbertSpec{0.1}), mu, MonteCarlo{64, 3}, 20000, 4);
  std::vector<Function> fs;
  for (const auto& h : hs) fs.push_back(h.function().scaled(1.0 / std::sqrt(var.total.value)));
  const auto b = clt_bounds(fs, mu, {.mc_samples = 4000, .seed = 9});
  double max = 0.0;
  for (const auto& [name, e] : b.terms) max = std::max(max, e.value);
  EXPECT_EQ(b.B, max);
  EXPECT_EQ(b.B_prime, std::max({std::abs(1.0 - b.sigma_sq.value), b.B, std::pow(b.B, 1.5)}));
  EXPECT_EQ(b.terms.at(b.dominant_term).value, b.B);
  EXPECT_TRUE(b.terms.count("(1,2,1,1)"));
  EXPECT_TRUE(b.terms.count("(2,2,1,1)"));
  EXPECT_TRUE(b.terms.count("norm4(2)"));
  EXPECT_NEAR(b.sigma_sq.value, 1.0, 0.1);
}

TEST(DeJong, ProductDegenerate) {
  const PointMeasure p(kUnit1, 1.0);
  const Kernel f2 = make_kernel(centered_linear_product(0.5, 0.5));
  const auto r = dejong_b(f2, p, Quadrature{}, {.mc_samples = 100000, .inner_samples = 8, .seed = 2});
  EXPECT_NEAR(r.star11.value, 1.0 / 144.0, 0.02 / 144.0);
  EXPECT_NEAR(r.star20.value, 1.0 / 80.0, 0.02 / 80.0);
  EXPECT_NEAR(r.star21.value, std::sqrt(1.0 / 80.0) / 12.0, 0.02 * std::sqrt(1.0 / 80.0) / 12.0);
  EXPECT_NEAR(r.norm_sq.value, 1.0 / 144.0, 3 * r.norm_sq.se);
  EXPECT_EQ(r.b, std::max({r.star20.value, r.star11.value, r.star21.value}));
  EXPECT_NEAR(r.wasserstein_form, r.b / r.norm_sq.value, 1e-12);
}

TEST(DeJong, NonDegenerateRejected) {
  const PointMeasure p(kUnit1, 1.0);
  EXPECT_THROW(dejong_b(make_kernel(ConstantSpec{2}), p, Quadrature{}), std::domain_error);
}

TEST(FourthMoment, NormalAndExponential) {
  Stream rng(4);
  std::vector<double> z(100000), e(100000);
  for (auto& v : z) v = rng.normal();
  for (auto& v : e) v = -std::log1p(-rng.uniform());
  const auto gz = fourth_moment_gap(z);
  EXPECT_LE(std::abs(gz.value), 3 * gz.se);
  const auto ge = fourth_moment_gap(e);
  EXPECT_LE(std::abs(ge.value - 6.0), 3 * ge.se);
  EXPECT_THROW(fourth_moment_gap(std::vector<double>(50, 1.0)), std::invalid_argument);
}

TEST(Gamma, Constants) {
  EXPECT_DOUBLE_EQ(gamma_constant(2), 1.0);
  EXPECT_DOUBLE_EQ(gamma_constant(4), 1.0 / 18.0);
  const PointMeasure p(kUnit1, 1.0);
  EXPECT_THROW(gamma_bound_terms(constant_fn(3, 1.0), 1.0, p), std::invalid_argument);
}

TEST(Gamma, ProductKernelTerms) {
  // h = g ⊗ g with ∫ g^2 = 1/12: 2 ||h||^2 = 2/144, so nu = 1/144 cancels
  // the variance term; h ⋆_1^1 h = h / 12 and the "sym" term is
  // ||h/12 - c_2 h|| = (11/12) (1/12).
  const PointMeasure p(kUnit1, 1.0);
  const Function h(2, [](std::span<const PointView> x, Stream&) {
    return (x[0].x[0] - 0.5) * (x[1].x[0] - 0.5);
  }, true);
  const auto r = gamma_bound_terms(h, 1.0 / 144.0, p, {.mc_samples = 200000, .inner_samples = 4});
  EXPECT_NEAR(r.terms.at("variance").value, 0.0, 2e-4);
  EXPECT_NEAR(r.terms.at("sym").value, 11.0 / 144.0, 0.02 * 11.0 / 144.0);
  double max = 0.0;
  for (const auto& [k, e] : r.terms) max = std::max(max, e.value);
  EXPECT_EQ(r.max, max);
}

TEST(Regimes, Classification) {
  const std::vector<double> t = {10, 100, 1000};
  auto one = predict_regime(2, t, std::vector<double>{1, 1, 1});
  EXPECT_EQ(one.back().regime, Regime::constant);
  EXPECT_NEAR(one.back().variance_order, 1000.0, 1e-9);
  auto lng = predict_regime(2, t, t);
  EXPECT_EQ(lng.back().regime, Regime::long_range);
  EXPECT_NEAR(lng.back().variance_order, std::pow(1000.0, 3), 1e-3);
  auto rare = predict_regime(2, t, std::vector<double>{0.1, 0.01, 0.001});
  EXPECT_EQ(rare.back().regime, Regime::rare);
  EXPECT_FALSE(rare.back().clt_expected);
  std::vector<double> v;
  for (double x : t) v.push_back(std::pow(x, -0.25));
  auto small = predict_regime(2, t, v);
  EXPECT_EQ(small.back().regime, Regime::small);
  EXPECT_TRUE(small.back().clt_expected);
  EXPECT_NEAR(small.back().variance_order, std::pow(1000.0, 0.75), 1e-6);
  auto mixed = predict_regime(2, t, std::vector<double>{1, 2, 1});
  EXPECT_EQ(mixed.back().regime, Regime::inconclusive);
  EXPECT_FALSE(mixed.back().diagnostics.empty());
  EXPECT_THROW(predict_regime(2, std::vector<double>{1, 2}, std::vector<double>{1, 1}),
               std::invalid_argument);
}

TEST(Regimes, GeometricVarianceOrder) {
  const auto a = geometric_variance_order(2, 1, 10.0);
  EXPECT_NEAR(a.order, 1000.0, 1e-9);
  EXPECT_TRUE(a.clt_expected);
  EXPECT_NEAR(geometric_variance_order(3, 3, 10.0).order, 1000.0, 1e-9);
  EXPECT_FALSE(geometric_variance_order(2, 2, 10.0).clt_expected);
}

}  // namespace
}  // namespace pustat
