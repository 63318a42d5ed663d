#include "pustat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pustat {
namespace {

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double torus_squared_distance(std::span<const double> a,
                              std::span<const double> b, double period) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::fmod(std::abs(a[i] - b[i]), period);
    d = std::min(d, period - d);
    s += d * d;
  }
  return s;
}

// Error-free transformations for the exact orientation predicate.
struct TwoTerm {
  double hi, lo;
};

TwoTerm two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

TwoTerm two_product(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

// Adds `b` to a nonoverlapping expansion ordered by increasing magnitude.
void grow_expansion(std::vector<double>& e, double b) {
  double q = b;
  for (double& component : e) {
    const TwoTerm t = two_sum(q, component);
    component = t.lo;
    q = t.hi;
  }
  e.push_back(q);
}

std::array<double, 2> planar(const PointView& p) {
  if (p.x.size() != 2) {
    throw std::invalid_argument("convex_position needs planar points");
  }
  return {p.x[0], p.x[1]};
}

}  // namespace

// Kernel --------------------------------------------------------------------

Kernel::Kernel(std::string name, int order, PointKernelFn fn, KernelInfo info)
    : name_(std::move(name)),
      order_(order),
      domain_(Domain::points),
      info_(info),
      point_fn_(std::move(fn)) {
  if (order_ < 1) throw std::invalid_argument("kernel order must be >= 1");
  if (!point_fn_) throw std::invalid_argument("kernel function is empty");
}

Kernel::Kernel(std::string name, int order, FlatKernelFn fn, KernelInfo info)
    : name_(std::move(name)),
      order_(order),
      domain_(Domain::flats),
      info_(info),
      flat_fn_(std::move(fn)) {
  if (order_ < 1) throw std::invalid_argument("kernel order must be >= 1");
  if (!flat_fn_) throw std::invalid_argument("kernel function is empty");
}

double Kernel::operator()(std::span<const PointView> args) const {
  if (domain_ != Domain::points) {
    throw std::invalid_argument(name_ + ": kernel is defined on flats");
  }
  if (args.size() != static_cast<std::size_t>(order_)) {
    throw std::invalid_argument(name_ + ": wrong number of arguments");
  }
  return point_fn_(args);
}

double Kernel::operator()(std::span<const Flat* const> args) const {
  if (domain_ != Domain::flats) {
    throw std::invalid_argument(name_ + ": kernel is defined on points");
  }
  if (args.size() != static_cast<std::size_t>(order_)) {
    throw std::invalid_argument(name_ + ": wrong number of arguments");
  }
  return flat_fn_(args);
}

// Built-ins -------------------------------------------------------------------

namespace {

Kernel make(const GilbertSpec& s) {
  check_positive(s.delta, "gilbert delta");
  const double d2 = s.delta * s.delta;
  KernelInfo info{.locality_radius = std::nullopt,
                  .sup_norm = 0.5,
                  .nonnegative = true,
                  .prefactor = 0.5};
  if (s.torus_period) {
    const double period = *s.torus_period;
    check_positive(period, "torus period");
    if (2.0 * s.delta > period) {
      throw std::invalid_argument("gilbert delta must be at most half the torus period");
    }
    return Kernel(
        "gilbert_torus", 2,
        [d2, period](std::span<const PointView> a) {
          return torus_squared_distance(a[0].x, a[1].x, period) <= d2 ? 0.5 : 0.0;
        },
        info);
  }
  info.locality_radius = s.delta;
  return Kernel(
      "gilbert", 2,
      [d2](std::span<const PointView> a) {
        return squared_distance(a[0].x, a[1].x) <= d2 ? 0.5 : 0.0;
      },
      info);
}

Kernel make(const RipsSpec& s) {
  if (s.face_dim < 1) throw std::invalid_argument("rips face dimension must be >= 1");
  check_positive(s.delta, "rips delta");
  const int order = s.face_dim + 1;
  const double value = 1.0 / factorial(order);
  const double d2 = s.delta * s.delta;
  KernelInfo info{.locality_radius = s.delta,
                  .sup_norm = value,
                  .nonnegative = true,
                  .prefactor = value};
  return Kernel(
      "rips", order,
      [d2, value](std::span<const PointView> a) {
        for (std::size_t i = 0; i < a.size(); ++i) {
          for (std::size_t j = i + 1; j < a.size(); ++j) {
            if (!(squared_distance(a[i].x, a[j].x) <= d2)) return 0.0;
          }
        }
        return value;
      },
      info);
}

Kernel make(const SylvesterSpec& s) {
  if (s.k < 3) throw std::invalid_argument("sylvester needs k >= 3");
  KernelInfo info{.locality_radius = std::nullopt,
                  .sup_norm = 1.0,
                  .nonnegative = true,
                  .prefactor = 1.0};
  return Kernel(
      "sylvester", s.k,
      [](std::span<const PointView> a) {
        return convex_position(a).convex ? 1.0 : 0.0;
      },
      info);
}

Kernel make(const LineIntersectionSpec& s) {
  check_positive(s.window_radius, "line_intersection window radius");
  const Window window = Window::ball(2, s.window_radius);
  KernelInfo info{.locality_radius = std::nullopt,
                  .sup_norm = 0.5,
                  .nonnegative = true,
                  .prefactor = 0.5};
  return Kernel(
      "line_intersection", 2,
      [window](std::span<const Flat* const> a) {
        const LineGeometry g = line_geometry(*a[0], *a[1], window);
        return g.intersects_in_window ? 0.5 : 0.0;
      },
      info);
}

Kernel make(const ProximitySpec& s) {
  check_positive(s.delta, "proximity delta");
  check_positive(s.window_radius, "proximity window radius");
  const Window window = Window::ball(3, s.window_radius);
  const double delta = s.delta;
  KernelInfo info{.locality_radius = delta,
                  .sup_norm = 0.5,
                  .nonnegative = true,
                  .prefactor = 0.5};
  return Kernel(
      "proximity", 2,
      [window, delta](std::span<const Flat* const> a) {
        const LineGeometry g = line_geometry(*a[0], *a[1], window);
        if (g.parallel || !(g.distance <= delta)) return 0.0;
        return window.contains(g.midpoint) ? 0.5 : 0.0;
      },
      info);
}

Kernel make(const ConstantSpec& s) {
  if (s.k < 1) throw std::invalid_argument("constant kernel order must be >= 1");
  KernelInfo info{.locality_radius = std::nullopt,
                  .sup_norm = 1.0,
                  .nonnegative = true,
                  .prefactor = 1.0};
  if (s.domain == Domain::flats) {
    return Kernel("constant", s.k,
                  [](std::span<const Flat* const>) { return 1.0; }, info);
  }
  return Kernel("constant", s.k,
                [](std::span<const PointView>) { return 1.0; }, info);
}

Kernel make(const ProductDegenerateSpec& s) {
  if (!s.g) throw std::invalid_argument("product_degenerate needs a function g");
  check_positive(s.sup_abs_g, "product_degenerate sup |g|");
  KernelInfo info{.locality_radius = std::nullopt,
                  .sup_norm = s.sup_abs_g * s.sup_abs_g,
                  .nonnegative = false,
                  .prefactor = 1.0};
  auto g = s.g;
  return Kernel(
      "product_degenerate", 2,
      [g](std::span<const PointView> a) { return g(a[0]) * g(a[1]); }, info);
}

}  // namespace

Kernel make_kernel(const KernelSpec& spec) {
  return std::visit([](const auto& s) { return make(s); }, spec);
}

ProductDegenerateSpec centered_linear_product(double center, double half_width) {
  ProductDegenerateSpec s;
  s.g = [center](const PointView& p) { return p.x[0] - center; };
  s.sup_abs_g = half_width;
  s.label = "x0-center";
  return s;
}

Kernel rescale(const Kernel& kernel, double alpha) {
  check_positive(alpha, "rescaling factor");
  if (kernel.domain() != Domain::points) {
    throw std::invalid_argument("rescale applies to point kernels");
  }
  KernelInfo info = kernel.info();
  if (info.locality_radius) info.locality_radius = *info.locality_radius / alpha;
  const Kernel base = kernel;
  return Kernel(
      kernel.name() + "@" + std::to_string(alpha), kernel.order(),
      [base, alpha](std::span<const PointView> a) {
        std::size_t total = 0;
        for (const auto& p : a) total += p.x.size();
        std::vector<double> coords(total);
        std::vector<PointView> views(a.size());
        std::size_t offset = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          const std::size_t d = a[i].x.size();
          for (std::size_t j = 0; j < d; ++j) coords[offset + j] = alpha * a[i].x[j];
          views[i] = {std::span<const double>(coords.data() + offset, d), a[i].mark};
          offset += d;
        }
        return base.eval_points(views);
      },
      info);
}

// Geometry ------------------------------------------------------------------

int orientation_sign(std::array<double, 2> a, std::array<double, 2> b,
                     std::array<double, 2> c) {
  // det = ax(by - cy) + bx(cy - ay) + cx(ay - by), expanded into six exact
  // products and summed exactly.
  const TwoTerm terms[6] = {
      two_product(a[0], b[1]),  two_product(-a[0], c[1]),
      two_product(b[0], c[1]),  two_product(-b[0], a[1]),
      two_product(c[0], a[1]),  two_product(-c[0], b[1]),
  };
  std::vector<double> expansion;
  expansion.reserve(13);
  for (const TwoTerm& t : terms) {
    grow_expansion(expansion, t.lo);
    grow_expansion(expansion, t.hi);
  }
  for (auto it = expansion.rbegin(); it != expansion.rend(); ++it) {
    if (*it > 0.0) return 1;
    if (*it < 0.0) return -1;
  }
  return 0;
}

ConvexPosition convex_position(std::span<const std::array<double, 2>> points) {
  const std::size_t k = points.size();
  if (k < 3) throw std::invalid_argument("convex_position needs at least 3 points");
  ConvexPosition result;
  std::vector<std::array<double, 2>> p(points.begin(), points.end());
  std::sort(p.begin(), p.end());
  for (std::size_t i = 1; i < k; ++i) {
    if (p[i] == p[i - 1]) {
      result.degenerate = true;
      return result;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      for (std::size_t l = j + 1; l < k; ++l) {
        if (orientation_sign(p[i], p[j], p[l]) == 0) {
          result.degenerate = true;
          return result;
        }
      }
    }
  }
  // Andrew's monotone chain; collinear points were excluded above.
  std::vector<std::array<double, 2>> hull;
  hull.reserve(2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    while (hull.size() >= 2 &&
           orientation_sign(hull[hull.size() - 2], hull.back(), p[i]) <= 0) {
      hull.pop_back();
    }
    hull.push_back(p[i]);
  }
  const std::size_t lower = hull.size() + 1;
  for (std::size_t i = k - 1; i-- > 0;) {
    while (hull.size() >= lower &&
           orientation_sign(hull[hull.size() - 2], hull.back(), p[i]) <= 0) {
      hull.pop_back();
    }
    hull.push_back(p[i]);
  }
  hull.pop_back();
  result.convex = hull.size() == k;
  return result;
}

ConvexPosition convex_position(std::span<const PointView> points) {
  std::vector<std::array<double, 2>> p;
  p.reserve(points.size());
  for (const auto& v : points) p.push_back(planar(v));
  return convex_position(std::span<const std::array<double, 2>>(p));
}

LineGeometry line_geometry(const Flat& h1, const Flat& h2, const Window& window) {
  if (h1.flat_dim() != 1 || h2.flat_dim() != 1) {
    throw std::invalid_argument("line_geometry needs two lines");
  }
  if (h1.ambient_dim() != h2.ambient_dim()) {
    throw std::invalid_argument("line_geometry: ambient dimensions differ");
  }
  LineGeometry g;
  const auto& b1 = h1.base;
  const auto& b2 = h2.base;
  const auto& u1 = h1.directions[0];
  const auto& u2 = h2.directions[0];
  if (h1.ambient_dim() == 2) {
    const double det = u1[0] * u2[1] - u1[1] * u2[0];
    if (std::abs(det) < kParallelThreshold) {
      g.parallel = true;
      g.distance = std::abs((b2[0] - b1[0]) * -u1[1] + (b2[1] - b1[1]) * u1[0]);
      return g;
    }
    const double wx = b2[0] - b1[0];
    const double wy = b2[1] - b1[1];
    const double s = (wx * u2[1] - wy * u2[0]) / det;
    g.intersection = {b1[0] + s * u1[0], b1[1] + s * u1[1]};
    g.intersects_in_window = window.contains(g.intersection);
    return g;
  }
  if (h1.ambient_dim() != 3) {
    throw std::invalid_argument("line_geometry supports ambient dimension 2 or 3");
  }
  const std::array<double, 3> cross{u1[1] * u2[2] - u1[2] * u2[1],
                                    u1[2] * u2[0] - u1[0] * u2[2],
                                    u1[0] * u2[1] - u1[1] * u2[0]};
  const double cn = std::sqrt(cross[0] * cross[0] + cross[1] * cross[1] +
                              cross[2] * cross[2]);
  const std::array<double, 3> w{b2[0] - b1[0], b2[1] - b1[1], b2[2] - b1[2]};
  if (cn < kParallelThreshold) {
    g.parallel = true;
    const double along = w[0] * u1[0] + w[1] * u1[1] + w[2] * u1[2];
    double d2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double c = w[i] - along * u1[i];
      d2 += c * c;
    }
    g.distance = std::sqrt(d2);
    return g;
  }
  g.distance = std::abs(w[0] * cross[0] + w[1] * cross[1] + w[2] * cross[2]) / cn;
  // Closest points b1 + s u1 and b2 + r u2 (unit directions).
  const double b = u1[0] * u2[0] + u1[1] * u2[1] + u1[2] * u2[2];
  const double d = -(u1[0] * w[0] + u1[1] * w[1] + u1[2] * w[2]);
  const double e = -(u2[0] * w[0] + u2[1] * w[1] + u2[2] * w[2]);
  const double denom = 1.0 - b * b;
  const double s = (b * e - d) / denom;
  const double r = (e - b * d) / denom;
  for (int i = 0; i < 3; ++i) {
    g.midpoint[i] = 0.5 * ((b1[i] + s * u1[i]) + (b2[i] + r * u2[i]));
  }
  return g;
}

// Rapid decrease -------------------------------------------------------------

Estimate rapid_decrease_constant(const Kernel& kernel,
                                 const RapidDecreaseSpec& spec,
                                 std::size_t mc_samples, std::uint64_t seed) {
  if (kernel.domain() != Domain::points) {
    throw std::invalid_argument("rapid_decrease_constant needs a point kernel");
  }
  if (spec.p != 2 && spec.p != 4) {
    throw std::invalid_argument("rapid_decrease_constant: p must be 2 or 4");
  }
  check_positive(spec.scale, "pilot density scale");
  if (spec.dim < 1) throw std::invalid_argument("pilot density dimension must be >= 1");
  if (mc_samples == 0) throw std::invalid_argument("mc_samples must be positive");

  const int k = kernel.order();
  const auto dim = static_cast<std::size_t>(spec.dim);
  const double s2 = spec.scale * spec.scale;
  const double log_norm = -0.5 * spec.dim * std::log(2.0 * std::numbers::pi * s2);
  std::vector<double> coords(static_cast<std::size_t>(k) * dim, 0.0);
  std::vector<PointView> args(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    args[i].x = std::span<const double>(coords.data() + i * dim, dim);
  }
  Stream rng(seed, 0, 0x4170);
  RunningEstimate acc(mc_samples);
  for (std::size_t n = 0; n < mc_samples; ++n) {
    double log_kappa = 0.0;
    for (int i = 1; i < k; ++i) {
      double r2 = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double z = spec.scale * rng.normal();
        coords[i * dim + j] = z;
        r2 += z * z;
      }
      log_kappa += log_norm - r2 / (2.0 * s2);
    }
    for (int i = 0; i < k; ++i) {
      args[i].mark = spec.marks ? sample_mark(*spec.marks, rng) : 0.0;
    }
    const double f = kernel.eval_points(args);
    const double term =
        f == 0.0 ? 0.0 : std::pow(f, spec.p) * std::exp(-spec.p * log_kappa);
    acc.add(term);
  }
  return acc.finish();
}

}  // namespace pustat
