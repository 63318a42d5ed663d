#include "pustat/chaos.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pustat {
namespace {

double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return std::round(c);
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Owns coordinates for `count` points and exposes them as PointViews.
class PointBuffer {
 public:
  PointBuffer(std::size_t count, std::size_t dim)
      : dim_(dim), coords_(count * dim), views_(count) {
    for (std::size_t i = 0; i < count; ++i) {
      views_[i].x = std::span<const double>(coords_.data() + i * dim, dim);
    }
  }
  std::span<double> coords(std::size_t i) {
    return {coords_.data() + i * dim_, dim_};
  }
  void set_mark(std::size_t i, double m) { views_[i].mark = m; }
  std::span<const PointView> views() const { return views_; }
  std::size_t size() const { return views_.size(); }

  void draw(const PointMeasure& measure, Stream& rng) {
    for (std::size_t i = 0; i < views_.size(); ++i) {
      views_[i].mark = measure.sample(rng, coords(i));
    }
  }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<PointView> views_;
};

// Key for the evaluation-point-dependent Monte Carlo stream.
std::uint64_t point_key(std::uint64_t seed, std::span<const PointView> x) {
  std::uint64_t h = mix64(seed ^ 0x6368616f73ULL);
  for (const auto& p : x) {
    for (double v : p.x) h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(p.mark));
  }
  return h;
}

// Nodes and weights of the composite 5-point Gauss-Legendre rule on the
// window's axis, with weights normalized to sum to one.
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

AxisRule axis_rule(const Window& window, int axis, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 5>;
  const auto& abscissa = Rule::abscissa();
  const auto& weight = Rule::weights();
  std::vector<double> xi, wi;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    if (abscissa[i] == 0.0) {
      xi.push_back(0.0);
      wi.push_back(weight[i]);
    } else {
      xi.push_back(-abscissa[i]);
      wi.push_back(weight[i]);
      xi.push_back(abscissa[i]);
      wi.push_back(weight[i]);
    }
  }
  const double c = window.center()[axis];
  const double w = window.extent();
  const double h = 2.0 * w / panels;
  AxisRule rule;
  for (int p = 0; p < panels; ++p) {
    const double a = c - w + p * h;
    for (std::size_t i = 0; i < xi.size(); ++i) {
      rule.nodes.push_back(a + 0.5 * h * (xi[i] + 1.0));
      rule.weights.push_back(0.5 * h * wi[i] / (2.0 * w));
    }
  }
  return rule;
}

void require_quadrature_support(const PointMeasure& measure) {
  if (measure.window().kind() != WindowKind::box) {
    throw std::invalid_argument("quadrature needs a box window");
  }
  if (measure.marks()) {
    throw std::invalid_argument("quadrature needs an unmarked measure");
  }
}

// ∫ g(y_1..y_count) d(normalized mu)^count by the tensor rule. `prefix`
// points are placed before the integration variables.
double tensor_quadrature(const PointMeasure& measure, int panels,
                         std::span<const PointView> prefix, std::size_t count,
                         const std::function<double(std::span<const PointView>)>& g) {
  const int d = measure.dim();
  std::vector<AxisRule> rules;
  for (int a = 0; a < d; ++a) rules.push_back(axis_rule(measure.window(), a, panels));
  const std::size_t axes = count * static_cast<std::size_t>(d);
  PointBuffer ys(count, static_cast<std::size_t>(d));
  std::vector<PointView> args(prefix.begin(), prefix.end());
  args.resize(prefix.size() + count);
  for (std::size_t i = 0; i < count; ++i) args[prefix.size() + i] = ys.views()[i];
  if (axes == 0) return g(args);

  std::vector<std::size_t> index(axes, 0);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t ax = 0; ax < axes; ++ax) {
      const auto& rule = rules[ax % d];
      ys.coords(ax / d)[ax % d] = rule.nodes[index[ax]];
      w *= rule.weights[index[ax]];
    }
    total += w * g(args);
    std::size_t ax = axes;
    while (ax-- > 0) {
      if (++index[ax] < rules[ax % d].nodes.size()) break;
      index[ax] = 0;
      if (ax == 0) return total;
    }
  }
}

}  // namespace

// Function --------------------------------------------------------------------

Function::Function(int arity, Sampler sampler, bool exact)
    : arity_(arity), sampler_(std::move(sampler)), exact_(exact) {
  if (arity_ < 0) throw std::invalid_argument("function arity must be >= 0");
  if (!sampler_) throw std::invalid_argument("function sampler is empty");
}

Function Function::zero(int arity) {
  return Function(arity, [](std::span<const PointView>, Stream&) { return 0.0; },
                  true);
}

Function Function::scaled(double c) const {
  auto s = sampler_;
  return Function(arity_,
                  [s, c](std::span<const PointView> x, Stream& rng) {
                    return c * s(x, rng);
                  },
                  exact_);
}

// ChaosKernel -----------------------------------------------------------------

ChaosKernel::ChaosKernel(Kernel parent, int n, PointMeasure measure,
                         IntegrationSpec spec)
    : parent_(std::move(parent)),
      n_(n),
      measure_(std::move(measure)),
      spec_(std::move(spec)),
      coefficient_(binomial(parent_.order(), n)) {
  if (parent_.domain() != Domain::points) {
    throw std::invalid_argument("chaos kernels need a point kernel");
  }
  if (n_ < 0 || n_ > parent_.order()) {
    throw std::invalid_argument("chaos kernel order must lie in [0, k]");
  }
  if (const auto* c = std::get_if<ClosedForm>(&spec_); c && !c->partial) {
    throw std::invalid_argument("closed form without a partial function");
  }
  if (const auto* m = std::get_if<MonteCarlo>(&spec_); m && m->samples == 0) {
    throw std::invalid_argument("Monte Carlo integration needs samples > 0");
  }
  if (const auto* q = std::get_if<Quadrature>(&spec_)) {
    if (q->panels < 1) throw std::invalid_argument("quadrature needs panels >= 1");
    require_quadrature_support(measure_);
  }
}

Estimate ChaosKernel::parent_partial(std::span<const PointView> x) const {
  const int k = parent_.order();
  const auto j = x.size();
  if (j > static_cast<std::size_t>(k)) {
    throw std::invalid_argument("partial: too many arguments");
  }
  if (const auto* c = std::get_if<ClosedForm>(&spec_)) {
    return {c->partial(x), 0.0, false};
  }
  if (j == static_cast<std::size_t>(k)) return {parent_.eval_points(x), 0.0, false};
  const std::size_t free = static_cast<std::size_t>(k) - j;
  const double scale = std::pow(measure_.total_mass(), static_cast<double>(free));
  if (const auto* q = std::get_if<Quadrature>(&spec_)) {
    const double v = tensor_quadrature(
        measure_, q->panels, x, free,
        [this](std::span<const PointView> a) { return parent_.eval_points(a); });
    return {scale * v, 0.0, false};
  }
  const auto& mc = std::get<MonteCarlo>(spec_);
  Stream rng(point_key(mc.seed, x), j);
  PointBuffer ys(free, static_cast<std::size_t>(measure_.dim()));
  std::vector<PointView> args(x.begin(), x.end());
  args.resize(static_cast<std::size_t>(k));
  RunningEstimate acc(mc.samples);
  for (std::size_t s = 0; s < mc.samples; ++s) {
    ys.draw(measure_, rng);
    for (std::size_t i = 0; i < free; ++i) args[j + i] = ys.views()[i];
    acc.add(parent_.eval_points(args));
  }
  return acc.finish(scale);
}

Estimate ChaosKernel::partial(std::span<const PointView> x) const {
  if (x.size() > static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("partial: more arguments than the kernel order");
  }
  Estimate e = parent_partial(x);
  e.value *= coefficient_;
  e.se *= coefficient_;
  return e;
}

Estimate ChaosKernel::operator()(std::span<const PointView> x) const {
  if (x.size() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("chaos kernel: wrong number of arguments");
  }
  return partial(x);
}

Function ChaosKernel::function() const {
  const ChaosKernel self = *this;
  if (!std::holds_alternative<MonteCarlo>(spec_) || n_ == parent_.order()) {
    return Function(
        n_,
        [self](std::span<const PointView> x, Stream&) {
          return self.partial(x).value;
        },
        true);
  }
  // One fresh batch of inner draws per call: unbiased for h_n(x).
  const std::size_t samples = std::get<MonteCarlo>(spec_).samples;
  const int k = parent_.order();
  const std::size_t free = static_cast<std::size_t>(k - n_);
  const double scale =
      coefficient_ * std::pow(measure_.total_mass(), static_cast<double>(free));
  return Function(
      n_,
      [self, samples, k, free, scale](std::span<const PointView> x, Stream& rng) {
        PointBuffer ys(free, static_cast<std::size_t>(self.measure().dim()));
        std::vector<PointView> args(x.begin(), x.end());
        args.resize(static_cast<std::size_t>(k));
        double total = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
          ys.draw(self.measure(), rng);
          for (std::size_t i = 0; i < free; ++i) args[x.size() + i] = ys.views()[i];
          total += self.parent().eval_points(args);
        }
        return scale * total / static_cast<double>(samples);
      },
      false);
}

ChaosKernel chaos_kernel(const Kernel& f, int n, const PointMeasure& measure,
                         const IntegrationSpec& spec) {
  return ChaosKernel(f, n, measure, spec);
}

std::vector<ChaosKernel> chaos_kernels(const Kernel& f, const PointMeasure& measure,
                                       const IntegrationSpec& spec) {
  std::vector<ChaosKernel> out;
  for (int n = 1; n <= f.order(); ++n) out.emplace_back(f, n, measure, spec);
  return out;
}

// Norms -----------------------------------------------------------------------

Estimate kernel_moment(const Function& h, const PointMeasure& measure, int p,
                       std::size_t mc_samples, std::uint64_t seed) {
  if (p != 2 && p != 4) throw std::invalid_argument("kernel_moment: p must be 2 or 4");
  if (mc_samples == 0) throw std::invalid_argument("mc_samples must be positive");
  const auto n = static_cast<std::size_t>(h.arity());
  const double scale = std::pow(measure.total_mass(), static_cast<double>(n));
  Stream rng(seed, 0, 0x6d6f6d);
  PointBuffer xs(n, static_cast<std::size_t>(measure.dim()));
  RunningEstimate acc(mc_samples);
  for (std::size_t s = 0; s < mc_samples; ++s) {
    xs.draw(measure, rng);
    double term = 1.0;
    if (h.exact()) {
      const double v = h(xs.views(), rng);
      term = p == 2 ? v * v : (v * v) * (v * v);
    } else {
      for (int i = 0; i < p; ++i) term *= h(xs.views(), rng);
    }
    acc.add(term);
  }
  return acc.finish(scale);
}

Estimate kernel_norm_sq(const Function& h, const PointMeasure& measure,
                        std::size_t mc_samples, std::uint64_t seed) {
  return kernel_moment(h, measure, 2, mc_samples, seed);
}

Estimate kernel_norm_sq(const ChaosKernel& h, std::size_t mc_samples,
                        std::uint64_t seed) {
  return kernel_moment(h.function(), h.measure(), 2, mc_samples, seed);
}

ChaosVariance variance_chaos(const Kernel& f, const PointMeasure& measure,
                             const IntegrationSpec& spec, std::size_t mc_samples,
                             std::uint64_t seed) {
  ChaosVariance out;
  double var_se = 0.0;
  for (int n = 1; n <= f.order(); ++n) {
    const ChaosKernel h(f, n, measure, spec);
    Estimate e = kernel_norm_sq(h, mc_samples, mix64(seed + static_cast<std::uint64_t>(n)));
    const double c = factorial(n);
    e.value *= c;
    e.se *= c;
    out.total.value += e.value;
    var_se += e.se * e.se;
    out.total.unstable = out.total.unstable || e.unstable;
    out.terms.push_back(e);
  }
  out.total.se = std::sqrt(var_se);
  return out;
}

// Multiple integrals ----------------------------------------------------------

double multiple_integral(int n, const PartialFn& partial,
                         const PointConfiguration& config) {
  if (n < 0) throw std::invalid_argument("multiple_integral: n must be >= 0");
  const std::size_t count = config.size();
  std::vector<PointView> args;
  std::vector<std::size_t> idx;
  double total = 0.0;
  for (int l = 0; l <= n; ++l) {
    if (static_cast<std::size_t>(l) > count) break;
    const double coef = ((n - l) % 2 == 0 ? 1.0 : -1.0) * binomial(n, l);
    args.assign(static_cast<std::size_t>(l), PointView{});
    idx.assign(static_cast<std::size_t>(l), 0);
    double sum = 0.0;
    auto recurse = [&](auto&& self, int depth) -> void {
      if (depth == l) {
        sum += partial(args);
        return;
      }
      for (std::size_t i = 0; i < count; ++i) {
        bool used = false;
        for (int p = 0; p < depth; ++p) used = used || idx[p] == i;
        if (used) continue;
        idx[depth] = i;
        args[depth] = config[i];
        self(self, depth + 1);
      }
    };
    recurse(recurse, 0);
    total += coef * sum;
  }
  return total;
}

double multiple_integral(const ChaosKernel& h, const PointConfiguration& config) {
  if (config.dim() != h.measure().dim()) {
    throw std::invalid_argument("multiple_integral: configuration dimension mismatch");
  }
  return multiple_integral(
      h.order(), [&h](std::span<const PointView> x) { return h.partial(x).value; },
      config);
}

// Hoeffding -------------------------------------------------------------------

HoeffdingComponent::HoeffdingComponent(int m, Kernel parent, PointMeasure measure,
                                       IntegrationSpec spec)
    : m_(m), measure_(std::move(measure)), spec_(std::move(spec)) {
  if (m_ < 0 || m_ > parent.order()) {
    throw std::invalid_argument("Hoeffding component order must lie in [0, k]");
  }
  for (int n = 0; n <= m_; ++n) h_.emplace_back(parent, n, measure_, spec_);
  mean_ = h_[0](std::span<const PointView>{}).value;
}

double HoeffdingComponent::operator()(std::span<const PointView> x) const {
  if (x.size() != static_cast<std::size_t>(m_)) {
    throw std::invalid_argument("Hoeffding component: wrong number of arguments");
  }
  // Sum over subsets S of {0..m-1}; C(k,|S|)^{-1} h_|S|(x_S) is the
  // parent's partial integral at x_S.
  double total = 0.0;
  std::vector<PointView> sub;
  for (std::uint32_t mask = 0; mask < (1u << m_); ++mask) {
    sub.clear();
    for (int i = 0; i < m_; ++i) {
      if (mask & (1u << i)) sub.push_back(x[i]);
    }
    const auto s = static_cast<int>(sub.size());
    const ChaosKernel& h = h_[s];
    const double v = s == 0 ? mean_ : h(sub).value / h.coefficient();
    total += ((m_ - s) % 2 == 0 ? 1.0 : -1.0) * v;
  }
  return total;
}

Estimate HoeffdingComponent::integrate_last(std::span<const PointView> x) const {
  if (m_ < 1 || x.size() != static_cast<std::size_t>(m_ - 1)) {
    throw std::invalid_argument("integrate_last needs m - 1 arguments");
  }
  auto integrand = [this](std::span<const PointView> a) { return (*this)(a); };
  const bool use_rule = !std::holds_alternative<MonteCarlo>(spec_) &&
                        measure_.window().kind() == WindowKind::box &&
                        !measure_.marks();
  if (use_rule) {
    const int panels = std::holds_alternative<Quadrature>(spec_)
                           ? std::get<Quadrature>(spec_).panels
                           : 8;
    return {tensor_quadrature(measure_, panels, x, 1, integrand), 0.0, false};
  }
  const std::size_t samples = std::holds_alternative<MonteCarlo>(spec_)
                                  ? std::get<MonteCarlo>(spec_).samples
                                  : 4096;
  const std::uint64_t seed = std::holds_alternative<MonteCarlo>(spec_)
                                 ? std::get<MonteCarlo>(spec_).seed
                                 : 1;
  Stream rng(point_key(seed, x), 0x484f);
  PointBuffer y(1, static_cast<std::size_t>(measure_.dim()));
  std::vector<PointView> args(x.begin(), x.end());
  args.emplace_back();
  RunningEstimate acc(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    y.draw(measure_, rng);
    args.back() = y.views()[0];
    acc.add(integrand(args));
  }
  return acc.finish();
}

std::vector<HoeffdingComponent> hoeffding_components(const Kernel& f,
                                                     const PointMeasure& measure,
                                                     const IntegrationSpec& spec) {
  if (std::abs(measure.total_mass() - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "Hoeffding components need a probability measure (total mass 1)");
  }
  std::vector<HoeffdingComponent> out;
  for (int m = 0; m <= f.order(); ++m) out.emplace_back(m, f, measure, spec);
  return out;
}

HoeffdingRank hoeffding_rank(const Kernel& f, const PointMeasure& measure,
                             double tolerance, const IntegrationSpec& spec,
                             std::size_t mc_samples, std::uint64_t seed) {
  if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
  HoeffdingRank out;
  out.tolerance = tolerance;
  for (int n = 1; n <= f.order(); ++n) {
    const ChaosKernel h(f, n, measure, spec);
    const Estimate e = kernel_norm_sq(h, mc_samples, mix64(seed + static_cast<std::uint64_t>(n)));
    out.norms_sq.push_back(e);
    if (e.value > tolerance + 3.0 * e.se) {
      out.rank = n;
      return out;
    }
  }
  throw std::domain_error("rank undetermined (> k)");
}

// Contractions ----------------------------------------------------------------

Function contraction(const Function& f, const Function& g, int r, int l,
                     const PointMeasure& measure, std::size_t inner_samples) {
  const int q = f.arity();
  const int k = g.arity();
  if (r < 1 || l < 0 || l > r || r > std::min(q, k)) {
    throw std::invalid_argument("contraction: need 0 <= l <= r <= min(q, k), r >= 1");
  }
  if (inner_samples == 0) throw std::invalid_argument("inner_samples must be positive");
  const int arity = q + k - r - l;
  const bool exact = l == 0 && f.exact() && g.exact();
  const std::size_t inner = l == 0 ? 1 : inner_samples;
  const double scale = std::pow(measure.total_mass(), l);
  return Function(
      arity,
      [f, g, q, k, r, l, inner, scale, measure](std::span<const PointView> a,
                                                Stream& rng) {
        // a = (x_{r-l}, y_{q-r}, z_{k-r}).
        const auto shared = static_cast<std::size_t>(r - l);
        const auto ny = static_cast<std::size_t>(q - r);
        const auto nz = static_cast<std::size_t>(k - r);
        PointBuffer w(static_cast<std::size_t>(l), static_cast<std::size_t>(measure.dim()));
        std::vector<PointView> fa(static_cast<std::size_t>(q));
        std::vector<PointView> ga(static_cast<std::size_t>(k));
        const auto nl = static_cast<std::size_t>(l);
        for (std::size_t i = 0; i < shared; ++i) fa[nl + i] = ga[nl + i] = a[i];
        for (std::size_t i = 0; i < ny; ++i) fa[nl + shared + i] = a[shared + i];
        for (std::size_t i = 0; i < nz; ++i) ga[nl + shared + i] = a[shared + ny + i];
        double total = 0.0;
        for (std::size_t s = 0; s < inner; ++s) {
          if (l > 0) {
            w.draw(measure, rng);
            for (std::size_t i = 0; i < nl; ++i) fa[i] = ga[i] = w.views()[i];
          }
          total += f(fa, rng) * g(ga, rng);
        }
        return scale * total / static_cast<double>(inner);
      },
      exact);
}

Function symmetrize(const Function& f) {
  const int a = f.arity();
  if (a > 8) throw std::invalid_argument("symmetrize supports arity <= 8");
  std::vector<std::vector<int>> perms;
  std::vector<int> p(static_cast<std::size_t>(a));
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return Function(
      a,
      [f, perms](std::span<const PointView> x, Stream& rng) {
        std::vector<PointView> y(x.size());
        double total = 0.0;
        for (const auto& perm : perms) {
          for (std::size_t i = 0; i < perm.size(); ++i) y[i] = x[perm[i]];
          total += f(y, rng);
        }
        return total / static_cast<double>(perms.size());
      },
      f.exact());
}

Function combine(double a, const Function& f, double b, const Function& g) {
  if (f.arity() != g.arity()) throw std::invalid_argument("combine: arity mismatch");
  return Function(
      f.arity(),
      [a, f, b, g](std::span<const PointView> x, Stream& rng) {
        return a * f(x, rng) + b * g(x, rng);
      },
      f.exact() && g.exact());
}

Estimate l2_norm(const Function& h, const PointMeasure& measure,
                 std::size_t mc_samples, std::uint64_t seed) {
  const Estimate sq = kernel_moment(h, measure, 2, mc_samples, seed);
  Estimate e;
  e.unstable = sq.unstable;
  if (sq.value > 0.0) {
    e.value = std::sqrt(sq.value);
    e.se = sq.se / (2.0 * e.value);
  } else {
    e.se = std::sqrt(sq.se);
  }
  return e;
}

Estimate contraction_norm(const Function& f, const Function& g, int r, int l,
                          const PointMeasure& measure, std::size_t mc_samples,
                          std::uint64_t seed, std::size_t inner_samples) {
  return l2_norm(contraction(f, g, r, l, measure, inner_samples), measure,
                 mc_samples, seed);
}

// Malliavin -------------------------------------------------------------------

Estimate malliavin_pairing(std::span<const ChaosKernel> kernels,
                           const PointConfiguration& config, std::size_t mc_points,
                           std::uint64_t seed) {
  if (kernels.empty()) return {};
  if (mc_points == 0) throw std::invalid_argument("mc_points must be positive");
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    if (kernels[i].order() != static_cast<int>(i + 1)) {
      throw std::invalid_argument("malliavin_pairing expects h_1..h_k in order");
    }
  }
  const PointMeasure& measure = kernels.front().measure();
  Stream rng(seed, config.replicate, 0x4d414c);
  PointBuffer x(1, static_cast<std::size_t>(measure.dim()));
  RunningEstimate acc(mc_points);
  std::vector<PointView> args;
  for (std::size_t s = 0; s < mc_points; ++s) {
    x.draw(measure, rng);
    const PointView xv = x.views()[0];
    double dx = 0.0;
    double lx = 0.0;
    for (const ChaosKernel& h : kernels) {
      const int n = h.order();
      const double in = multiple_integral(
          n - 1,
          [&](std::span<const PointView> z) {
            args.assign(1, xv);
            args.insert(args.end(), z.begin(), z.end());
            return h.partial(args).value;
          },
          config);
      dx += n * in;
      lx += in;
    }
    acc.add(dx * lx);
  }
  return acc.finish(measure.total_mass());
}

// Closed forms ----------------------------------------------------------------

namespace analytic {

PartialFn constant(int k, double mass) {
  return [k, mass](std::span<const PointView> x) {
    return std::pow(mass, k - static_cast<int>(x.size()));
  };
}

PartialFn torus_gilbert(double delta, double period, double t) {
  return [delta, period, t](std::span<const PointView> x) {
    switch (x.size()) {
      case 2: {
        double d = std::fmod(std::abs(x[0].x[0] - x[1].x[0]), period);
        d = std::min(d, period - d);
        return d <= delta ? 0.5 : 0.0;
      }
      case 1:
        return t * delta;
      case 0:
        return t * period * t * delta;
      default:
        throw std::invalid_argument("torus_gilbert: order 2 kernel");
    }
  };
}

PartialFn product(std::function<double(const PointView&)> g, double integral_g) {
  return [g, integral_g](std::span<const PointView> x) {
    switch (x.size()) {
      case 2:
        return g(x[0]) * g(x[1]);
      case 1:
        return g(x[0]) * integral_g;
      case 0:
        return integral_g * integral_g;
      default:
        throw std::invalid_argument("product: order 2 kernel");
    }
  };
}

}  // namespace analytic
}  // namespace pustat
