#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pustat/chaos.hpp"
#include "pustat/kernels.hpp"
#include "pustat/stats.hpp"
#include "pustat/ustat.hpp"

namespace pustat {
namespace {

const Window kUnit1 = Window::box(1, 0.5, {0.5});

PointMeasure lebesgue(const Window& w, double t) { return PointMeasure(w, t * w.volume()); }

TEST(ChaosKernel, TopOrderIsKernel) {
  const Kernel g = make_kernel(GilbertSpec{0.2});
  const PointMeasure mu = lebesgue(Window::unit_cube(2), 10.0);
  const ChaosKernel h2(g, 2, mu, MonteCarlo{});
  Stream rng(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a = {rng.uniform(), rng.uniform()}, b = {rng.uniform(), rng.uniform()};
    const PointView x[] = {{a}, {b}};
    const auto e = h2(x);
    ASSERT_EQ(e.value, g(x));
    ASSERT_EQ(e.se, 0.0);
  }
}

TEST(ChaosKernel, ConstantClosedForm) {
  const Kernel one = make_kernel(ConstantSpec{2});
  const PointMeasure mu = lebesgue(kUnit1, 1.0);
  const ChaosKernel h1(one, 1, mu, ClosedForm{analytic::constant(2, 1.0)});
  EXPECT_EQ(h1.coefficient(), 2.0);
  const double x = 0.3;
  const PointView v[] = {{std::span<const double>(&x, 1)}};
  EXPECT_DOUBLE_EQ(h1(v).value, 2.0);
  const ChaosKernel h1q(one, 1, mu, Quadrature{});
  EXPECT_NEAR(h1q(v).value, 2.0, 1e-12);
}

TEST(ChaosKernel, OrderZeroMatchesMecke) {
  const Kernel g = make_kernel(GilbertSpec{0.1});
  IntensitySpec spec;
  spec.t = 50.0;
  const Window w = Window::unit_cube(2);
  const ChaosKernel h0(g, 0, PointMeasure(spec, w), Quadrature{16});
  const auto q = h0({});
  const auto m = mecke_expectation(g, spec, w, 400000, 3);
  EXPECT_LE(std::abs(q.value - m.value), 3.0 * (q.se + m.se) + 1e-3 * m.value);
}

TEST(ChaosKernel, RejectsBadOrder) {
  const Kernel g = make_kernel(GilbertSpec{0.1});
  const PointMeasure mu = lebesgue(Window::unit_cube(2), 1.0);
  EXPECT_THROW(chaos_kernel(g, 3, mu, MonteCarlo{}), std::invalid_argument);
  EXPECT_THROW(chaos_kernel(g, -1, mu, MonteCarlo{}), std::invalid_argument);
  EXPECT_THROW(chaos_kernel(g, 1, PointMeasure(Window::ball(2, 1.0), 1.0), Quadrature{}),
               std::invalid_argument);
}

TEST(KernelNorm, ConstantFunction) {
  const PointMeasure mu = lebesgue(Window::unit_cube(2), 3.0);
  const Function c(2, [](std::span<const PointView>, Stream&) { return 1.5; }, true);
  EXPECT_NEAR(kernel_norm_sq(c, mu, 100, 1).value, 2.25 * 9.0, 1e-12);
}

TEST(KernelNorm, ConstantKernelChaos) {
  for (double t : {1.0, 2.5}) {
    const PointMeasure mu = lebesgue(kUnit1, t);
    const auto hs = chaos_kernels(make_kernel(ConstantSpec{2}), mu,
                                  ClosedForm{analytic::constant(2, t)});
    EXPECT_NEAR(kernel_norm_sq(hs[0], 10, 1).value, 4.0 * t * t * t, 1e-9);
    EXPECT_NEAR(kernel_norm_sq(hs[1], 10, 1).value, t * t, 1e-9);
  }
}

// (1/4) t^2 ∫∫ 1(|x - y| <= delta) over [0,1]^2, from the closed form of
// the area of a disk intersected with the unit square, integrated over
// the difference vector: ∫ (1-|u|)(1-|v|) 1(|(u,v)| <= delta) du dv.
double gilbert_pair_area(double d) {
  // Polar: ∫_0^d ∫_0^{2pi} (1 - r|cos|)(1 - r|sin|) r dθ dr
  //      = pi d^2 - 8 d^3 / 3 + d^4 / 2.
  return std::numbers::pi * d * d - 8.0 * d * d * d / 3.0 + d * d * d * d / 2.0;
}

TEST(KernelNorm, GilbertTopOrderMatchesOracle) {
  const double t = 30.0, d = 0.2;
  const PointMeasure mu = lebesgue(Window::unit_cube(2), t);
  const ChaosKernel h2(make_kernel(GilbertSpec{d}), 2, mu, MonteCarlo{});
  const auto est = kernel_norm_sq(h2, 400000, 7);
  const double oracle = 0.25 * t * t * gilbert_pair_area(d);
  EXPECT_NEAR(est.value, oracle, 0.02 * oracle);
}

TEST(VarianceChaos, PoissonCount) {
  const PointMeasure mu = lebesgue(kUnit1, 7.0);
  const auto v = variance_chaos(make_kernel(ConstantSpec{1}), mu,
                                ClosedForm{analytic::constant(1, 7.0)}, 10, 1);
  EXPECT_NEAR(v.total.value, 7.0, 1e-12);
}

TEST(VarianceChaos, ConstantOrderTwo) {
  for (double t : {1.0, 3.0}) {
    const PointMeasure mu = lebesgue(kUnit1, t);
    const auto v = variance_chaos(make_kernel(ConstantSpec{2}), mu,
                                  ClosedForm{analytic::constant(2, t)}, 10, 1);
    EXPECT_NEAR(v.total.value, 4 * t * t * t + 2 * t * t, 1e-9);
    ASSERT_EQ(v.terms.size(), 2u);
  }
}

TEST(VarianceChaos, TorusGilbertClosedForm) {
  // On the 1D torus h_1 = 2 t delta is constant, so
  // Var = t (2 t delta)^2 + 2 t^2 delta / 2.
  const double t = 20.0, d = 0.1;
  const PointMeasure mu = lebesgue(kUnit1, t);
  const auto v = variance_chaos(make_kernel(GilbertSpec{d, 1.0}), mu,
                                ClosedForm{analytic::torus_gilbert(d, 1.0, t)}, 200000, 1);
  const double oracle = t * std::pow(2 * t * d, 2) + t * t * d;
  EXPECT_NEAR(v.total.value, oracle, 3.0 * v.total.se + 1e-9);
}

TEST(MultipleIntegral, HandCases) {
  const auto c = PointConfiguration::from_points(kUnit1, {{0.1}, {0.5}, {0.8}});
  const PointMeasure mu = lebesgue(kUnit1, 1.0);
  EXPECT_NEAR(multiple_integral(1, analytic::constant(1, 1.0), c), 2.0, 1e-15);
  const auto p = analytic::constant(2, 1.0);
  const ChaosKernel h0(make_kernel(ConstantSpec{2}), 0, mu, ClosedForm{p});
  const ChaosKernel h1(make_kernel(ConstantSpec{2}), 1, mu, ClosedForm{p});
  const ChaosKernel h2(make_kernel(ConstantSpec{2}), 2, mu, ClosedForm{p});
  EXPECT_NEAR(multiple_integral(h0, c), 1.0, 1e-15);
  EXPECT_NEAR(multiple_integral(h1, c), 4.0, 1e-15);
  EXPECT_NEAR(multiple_integral(h2, c), 1.0, 1e-15);
}

TEST(MultipleIntegral, CenteredAndOrthogonal) {
  const double t = 15.0, d = 0.1;
  const PointMeasure mu = lebesgue(kUnit1, t);
  IntensitySpec spec;
  spec.t = t;
  const Kernel g = make_kernel(GilbertSpec{d, 1.0});
  const auto p = analytic::torus_gilbert(d, 1.0, t);
  const ChaosKernel h1(g, 1, mu, ClosedForm{p}), h2(g, 2, mu, ClosedForm{p});
  std::vector<double> i1, i2, prod;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    const auto c = sample_points(spec, kUnit1, 13, r);
    i1.push_back(multiple_integral(h1, c));
    i2.push_back(multiple_integral(h2, c));
    prod.push_back(i1.back() * i2.back());
  }
  for (const auto* v : {&i1, &i2, &prod}) {
    const auto s = summarize(*v);
    EXPECT_LE(std::abs(s.mean.value), 3.0 * s.mean.se);
  }
}

TEST(Hoeffding, OrderOneComponent) {
  const PointMeasure p = lebesgue(kUnit1, 1.0);
  const Kernel g1("identity", 1, [](std::span<const PointView> x) { return x[0].x[0]; });
  const auto hs = hoeffding_components(g1, p, Quadrature{});
  ASSERT_EQ(hs.size(), 2u);
  const double x = 0.9;
  const PointView v[] = {{std::span<const double>(&x, 1)}};
  EXPECT_NEAR(hs[1](v), 0.9 - 0.5, 1e-12);
}

TEST(Hoeffding, ComponentsAreDegenerate) {
  const PointMeasure p = lebesgue(Window::unit_cube(2), 1.0);
  const auto hs = hoeffding_components(make_kernel(GilbertSpec{0.3}), p, Quadrature{});
  Stream rng(17);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> a = {rng.uniform(), rng.uniform()};
    const PointView v[] = {{a}};
    EXPECT_LE(std::abs(hs[2].integrate_last(v).value), 1e-6);
  }
  EXPECT_THROW(hoeffding_components(make_kernel(GilbertSpec{0.3}),
                                    lebesgue(Window::unit_cube(2), 4.0), Quadrature{}),
               std::invalid_argument);
}

TEST(Hoeffding, Rank) {
  const PointMeasure p = lebesgue(kUnit1, 1.0);
  EXPECT_EQ(hoeffding_rank(make_kernel(ConstantSpec{2}), p, 1e-9, Quadrature{}, 1000, 1).rank, 1);
  EXPECT_EQ(hoeffding_rank(make_kernel(centered_linear_product(0.5, 0.5)), p, 1e-9,
                           Quadrature{}, 1000, 1)
                .rank,
            2);
  const Kernel zero("zero", 2, [](std::span<const PointView>) { return 0.0; });
  EXPECT_THROW(hoeffding_rank(zero, p, 1e-9, Quadrature{}, 1000, 1), std::domain_error);
}

TEST(Contraction, ConstantsOnProbabilityMeasure) {
  const PointMeasure p = lebesgue(Window::unit_cube(2), 1.0);
  const Function one2(2, [](std::span<const PointView>, Stream&) { return 1.0; }, true);
  for (auto [r, l] : {std::pair{1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}}) {
    EXPECT_NEAR(contraction_norm(one2, one2, r, l, p, 200, 1).value, 1.0, 1e-12);
  }
  EXPECT_THROW(contraction(one2, one2, 1, 2, p), std::invalid_argument);
  EXPECT_THROW(contraction(one2, one2, 0, 0, p), std::invalid_argument);
}

TEST(Contraction, FullContractionIsSquaredNorm) {
  const PointMeasure mu = lebesgue(Window::unit_cube(2), 5.0);
  const ChaosKernel h(make_kernel(GilbertSpec{0.3}), 2, mu, MonteCarlo{});
  const auto full = contraction_norm(h.function(), h.function(), 2, 2, mu, 1, 3, 400000);
  const auto norm = kernel_norm_sq(h, 400000, 4);
  EXPECT_NEAR(full.value, norm.value, 3.0 * (full.se + norm.se) + 0.02 * norm.value);
}

TEST(Contraction, TorusOverlap) {
  // (f ⋆_1^1 f)(y, z) = (1/4) (2 delta - d(y, z))_+ on the unit circle, so
  // ||f ⋆_1^1 f||^2 = (1/16) ∫ (2 delta - |s|)_+^2 ds = (1/16) 16 delta^3 / 3.
  const double d = 0.1;
  const PointMeasure mu = lebesgue(kUnit1, 1.0);
  const ChaosKernel f(make_kernel(GilbertSpec{d, 1.0}), 2, mu, MonteCarlo{});
  const auto est = contraction_norm(f.function(), f.function(), 1, 1, mu, 200000, 5, 16);
  const double oracle = std::sqrt(d * d * d / 3.0);
  EXPECT_NEAR(est.value, oracle, 0.02 * oracle);
}

TEST(Contraction, SymmetrizeAndCombine) {
  const PointMeasure mu = lebesgue(kUnit1, 1.0);
  const Function f(2, [](std::span<const PointView> x, Stream&) { return x[0].x[0]; }, true);
  const Function s = symmetrize(f);
  const Function diff = combine(1.0, f, -1.0, s);
  const double a = 0.2, b = 0.6;
  const PointView v[] = {{std::span<const double>(&a, 1)}, {std::span<const double>(&b, 1)}};
  Stream rng(1);
  EXPECT_DOUBLE_EQ(s(v, rng), 0.4);
  EXPECT_DOUBLE_EQ(diff(v, rng), -0.2);
  EXPECT_NEAR(l2_norm(Function::zero(3), mu, 100, 1).value, 0.0, 0.0);
}

TEST(Malliavin, FirstOrderIsNorm) {
  const double t = 4.0;
  const PointMeasure mu = lebesgue(kUnit1, t);
  const ChaosKernel h1(make_kernel(ConstantSpec{1}), 1, mu, ClosedForm{analytic::constant(1, t)});
  const auto c = PointConfiguration::from_points(kUnit1, {{0.1}, {0.4}});
  const ChaosKernel ks[] = {h1};
  EXPECT_NEAR(malliavin_pairing(ks, c, 100, 1).value, t, 1e-12);
}

TEST(Malliavin, ZeroKernels) {
  const PointMeasure mu = lebesgue(kUnit1, 2.0);
  const Kernel zero("zero", 2, [](std::span<const PointView>) { return 0.0; });
  const auto zeros = chaos_kernels(zero, mu, ClosedForm{[](std::span<const PointView>) { return 0.0; }});
  const auto c = PointConfiguration::from_points(kUnit1, {{0.1}, {0.4}, {0.7}});
  EXPECT_EQ(malliavin_pairing(zeros, c, 100, 1).value, 0.0);
}

}  // namespace
}  // namespace pustat
