#include "pustat/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pustat/stats.hpp"

namespace pustat {
namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double binomial(int n, int r) {
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return std::round(c);
}

std::string key(int n, int m, int r, int l) {
  std::ostringstream s;
  s << '(' << n << ',' << m << ',' << r << ',' << l << ')';
  return s.str();
}

Estimate sqrt_estimate(const Estimate& e) {
  Estimate out;
  out.unstable = e.unstable;
  if (e.value > 0.0) {
    out.value = std::sqrt(e.value);
    out.se = e.se / (2.0 * out.value);
  } else {
    out.se = std::sqrt(e.se);
  }
  return out;
}

// Seeds for the individual Monte Carlo terms, independent of evaluation order.
std::uint64_t term_seed(std::uint64_t seed, int a, int b, int c, int d) {
  return mix64(seed ^ mix64((static_cast<std::uint64_t>(a) << 48) ^
                            (static_cast<std::uint64_t>(b) << 32) ^
                            (static_cast<std::uint64_t>(c) << 16) ^
                            static_cast<std::uint64_t>(d)));
}

template <class Map>
std::pair<double, std::string> arg_max(const Map& terms) {
  double best = 0.0;
  std::string name;
  for (const auto& [k, e] : terms) {
    if (name.empty() || e.value > best) {
      best = e.value;
      name = k;
    }
  }
  return {best, name};
}

}  // namespace

BoundReport clt_bounds(std::span<const Function> kernels, const PointMeasure& measure,
                       const BoundOptions& options) {
  const int k = static_cast<int>(kernels.size());
  for (int n = 1; n <= k; ++n) {
    if (kernels[n - 1].arity() != n) {
      throw std::invalid_argument("clt_bounds expects h_1..h_k in order");
    }
  }
  BoundReport report;
  double var_se = 0.0;
  for (int n = 1; n <= k; ++n) {
    const Function& h = kernels[n - 1];
    const Estimate sq =
        kernel_moment(h, measure, 2, options.mc_samples, term_seed(options.seed, 0, n, 0, 0));
    report.sigma_sq.value += factorial(n) * sq.value;
    var_se += std::pow(factorial(n) * sq.se, 2);
    report.sigma_sq.unstable = report.sigma_sq.unstable || sq.unstable;

    const Estimate fourth =
        kernel_moment(h, measure, 4, options.mc_samples, term_seed(options.seed, 1, n, 0, 0));
    report.terms["norm4(" + std::to_string(n) + ")"] = sqrt_estimate(fourth);

    for (int r = 1; r <= n; ++r) {
      for (int l = 1; l <= std::min(r, n - 1); ++l) {
        report.terms[key(n, n, r, l)] =
            contraction_norm(h, h, r, l, measure, options.mc_samples,
                             term_seed(options.seed, 2, n, r, l), options.inner_samples);
      }
    }
    for (int m = n + 1; m <= k; ++m) {
      for (int r = 1; r <= n; ++r) {
        for (int l = 1; l <= r; ++l) {
          report.terms[key(n, m, r, l)] = contraction_norm(
              h, kernels[m - 1], r, l, measure, options.mc_samples,
              term_seed(options.seed, 3 + m, n, r, l), options.inner_samples);
        }
      }
    }
  }
  report.sigma_sq.se = std::sqrt(var_se);
  const auto [best, name] = arg_max(report.terms);
  report.B = best;
  report.dominant_term = name;
  report.B_prime = std::max({std::abs(1.0 - report.sigma_sq.value), report.B,
                             std::pow(report.B, 1.5)});
  report.unstable = report.sigma_sq.unstable;
  for (const auto& [_, e] : report.terms) report.unstable = report.unstable || e.unstable;
  return report;
}

DeJongReport dejong_b(const Kernel& f2, const PointMeasure& measure,
                      const IntegrationSpec& spec, const BoundOptions& options,
                      double tolerance, std::size_t check_points) {
  if (f2.order() != 2) throw std::invalid_argument("dejong_b needs an order-2 kernel");
  const ChaosKernel h(f2, 2, measure, spec);
  Stream rng(options.seed, 0, 0x444a);
  std::vector<double> x(static_cast<std::size_t>(measure.dim()));
  for (std::size_t i = 0; i < check_points; ++i) {
    const double mark = measure.sample(rng, x);
    const PointView p{x, mark};
    const Estimate e = h.partial(std::span<const PointView>(&p, 1));
    if (std::abs(e.value) > tolerance + 3.0 * e.se) {
      std::ostringstream msg;
      msg << "kernel is not degenerate: integral over the second argument is "
          << e.value << " at x = (";
      for (std::size_t a = 0; a < x.size(); ++a) msg << (a ? ", " : "") << x[a];
      msg << ')';
      throw std::domain_error(msg.str());
    }
  }
  const Function f = h.function();
  DeJongReport out;
  out.star20 = contraction_norm(f, f, 2, 0, measure, options.mc_samples,
                                term_seed(options.seed, 5, 2, 2, 0), options.inner_samples);
  out.star11 = contraction_norm(f, f, 1, 1, measure, options.mc_samples,
                                term_seed(options.seed, 5, 2, 1, 1), options.inner_samples);
  out.star21 = contraction_norm(f, f, 2, 1, measure, options.mc_samples,
                                term_seed(options.seed, 5, 2, 2, 1), options.inner_samples);
  out.norm_sq = kernel_norm_sq(f, measure, options.mc_samples,
                               term_seed(options.seed, 5, 2, 0, 0));
  out.b = std::max({out.star20.value, out.star11.value, out.star21.value});
  if (out.norm_sq.value > 0.0) {
    out.wasserstein_form = out.b / out.norm_sq.value;
    out.kolmogorov_form = std::max(out.b, std::pow(out.b, 1.5)) / out.norm_sq.value;
  }
  return out;
}

Estimate fourth_moment_gap(std::span<const double> samples) {
  if (samples.size() < 100) {
    throw std::invalid_argument("fourth_moment_gap needs at least 100 samples");
  }
  const SampleSummary s = summarize(samples);
  return {s.kurtosis.value - 3.0, s.kurtosis.se, false};
}

double gamma_constant(int k) {
  if (k < 2 || k % 2 != 0) {
    throw std::invalid_argument("gamma_constant needs an even k >= 2");
  }
  const double c = binomial(k, k / 2);
  return 4.0 / (factorial(k / 2) * c * c);
}

GammaReport gamma_bound_terms(const Function& h, double nu, const PointMeasure& measure,
                              const BoundOptions& options) {
  const int k = h.arity();
  if (k < 2 || k % 2 != 0) {
    throw std::invalid_argument("gamma_bound_terms needs an even kernel order k >= 2");
  }
  if (!(nu > 0.0)) throw std::invalid_argument("gamma_bound_terms needs nu > 0");
  GammaReport out;
  const Estimate sq =
      kernel_moment(h, measure, 2, options.mc_samples, term_seed(options.seed, 6, 0, 0, 0));
  out.terms["variance"] = {std::abs(factorial(k) * sq.value - 2.0 * nu),
                           factorial(k) * sq.se, sq.unstable};
  for (int p = 1; p <= k - 1; ++p) {
    if (2 * p == k) continue;
    out.terms["(" + std::to_string(p) + "," + std::to_string(p) + ")"] =
        contraction_norm(h, h, p, p, measure, options.mc_samples,
                         term_seed(options.seed, 7, p, p, 0), options.inner_samples);
  }
  auto add_root = [&](int r, int l) {
    const Estimate e =
        contraction_norm(h, h, r, l, measure, options.mc_samples,
                         term_seed(options.seed, 8, r, l, 0), options.inner_samples);
    out.terms["sqrt(" + std::to_string(r) + "," + std::to_string(l) + ")"] =
        sqrt_estimate(e);
  };
  for (int r = 1; r <= k; ++r) {
    add_root(r, 0);
    for (int l = 1; l <= std::min(r, k - 1); ++l) {
      if (l != r) add_root(r, l);
    }
  }
  const Function sym = symmetrize(contraction(h, h, k / 2, k / 2, measure,
                                              options.inner_samples));
  out.terms["sym"] = l2_norm(combine(1.0, sym, -gamma_constant(k), h), measure,
                             options.mc_samples, term_seed(options.seed, 9, 0, 0, 0));
  const auto [best, name] = arg_max(out.terms);
  out.max = best;
  out.dominant_term = name;
  return out;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::long_range:
      return "long";
    case Regime::constant:
      return "constant";
    case Regime::small:
      return "small";
    case Regime::rare:
      return "rare";
    case Regime::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::vector<RegimePrediction> predict_regime(int k, std::span<const double> t,
                                             std::span<const double> v_t) {
  if (k < 1) throw std::invalid_argument("predict_regime needs k >= 1");
  if (t.size() != v_t.size()) {
    throw std::invalid_argument("predict_regime: schedules differ in length");
  }
  if (t.size() < 3) throw std::invalid_argument("predict_regime needs 3 entries");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(v_t[i] > 0.0)) {
      throw std::invalid_argument("predict_regime: schedules must be positive");
    }
  }
  constexpr double kUp = 1.1;
  constexpr double kDown = 1.0 / 1.1;
  enum class Trend { up, down, flat, mixed };
  auto trend = [&](auto&& value) {
    const std::size_t n = t.size();
    const double r1 = value(n - 2) / value(n - 3);
    const double r2 = value(n - 1) / value(n - 2);
    if (r1 > kUp && r2 > kUp) return Trend::up;
    if (r1 < kDown && r2 < kDown) return Trend::down;
    if (r1 >= kDown && r1 <= kUp && r2 >= kDown && r2 <= kUp) return Trend::flat;
    return Trend::mixed;
  };
  auto v = [&](std::size_t i) { return v_t[i]; };
  auto s = [&](std::size_t i) { return t[i] * std::pow(v_t[i], k - 1); };
  const Trend tt = trend([&](std::size_t i) { return t[i]; });
  const Trend vt = trend(v);
  const Trend st = trend(s);

  Regime regime = Regime::inconclusive;
  std::string diag;
  if (tt != Trend::up) {
    diag = "t does not grow over the last three entries";
  } else if (vt == Trend::up) {
    regime = Regime::long_range;
  } else if (vt == Trend::flat) {
    regime = Regime::constant;
  } else if (vt == Trend::down && st == Trend::up) {
    regime = Regime::small;
  } else if (vt == Trend::down && (st == Trend::flat || st == Trend::down)) {
    regime = Regime::rare;
  } else {
    diag = "ratio tests disagree: ";
    diag += vt == Trend::mixed ? "v_t is neither growing, shrinking nor stationary"
                               : "t v_t^{k-1} is neither growing nor bounded";
  }

  std::vector<RegimePrediction> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    RegimePrediction p;
    p.t = t[i];
    p.v_t = v_t[i];
    p.regime = regime;
    const double inv = std::max(1.0, std::pow(v_t[i], -(k - 1)));
    p.variance_order = t[i] * std::pow(v_t[i], 2 * k - 2) * inv;
    p.rate = std::sqrt(inv / t[i]);
    p.clt_expected = regime == Regime::long_range || regime == Regime::constant ||
                     regime == Regime::small;
    p.diagnostics = diag;
    out.push_back(p);
  }
  return out;
}

VarianceOrder geometric_variance_order(int k, int n1, double t) {
  if (k < 1 || n1 < 1 || n1 > k) {
    throw std::invalid_argument("geometric_variance_order needs 1 <= n1 <= k");
  }
  if (!(t > 0.0)) throw std::invalid_argument("geometric_variance_order needs t > 0");
  return {std::pow(t, 2 * k - n1), n1 == 1};
}

}  // namespace pustat
