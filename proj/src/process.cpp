#include "pustat/process.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pustat {
namespace {

std::uint64_t hash_coords(std::span<const double> x) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (double v : x) {
    // +0.0 and -0.0 compare equal, so hash them identically.
    const double canon = v == 0.0 ? 0.0 : v;
    h = mix64(h ^ std::bit_cast<std::uint64_t>(canon));
  }
  return h;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("direction vector must be nonzero and finite");
  }
  for (double& x : v) x /= n;
}

}  // namespace

Window::Window(WindowKind kind, int dim, double extent,
               std::vector<double> center)
    : kind_(kind), dim_(dim), extent_(extent), center_(std::move(center)) {
  if (dim < 1) throw std::invalid_argument("window dimension must be >= 1");
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw std::invalid_argument("window extent must be positive and finite");
  }
  if (center_.empty()) center_.assign(static_cast<std::size_t>(dim), 0.0);
  if (center_.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("window center has wrong dimension");
  }
}

Window Window::box(int dim, double half_width) {
  return Window(WindowKind::box, dim, half_width, {});
}

Window Window::box(int dim, double half_width, std::vector<double> center) {
  return Window(WindowKind::box, dim, half_width, std::move(center));
}

Window Window::unit_cube(int dim) {
  return box(dim, 0.5, std::vector<double>(static_cast<std::size_t>(dim), 0.5));
}

Window Window::growing_box(int dim, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("growing_box requires t > 0");
  }
  return box(dim, std::pow(t, 1.0 / dim));
}

Window Window::ball(int dim, double radius) {
  return Window(WindowKind::ball, dim, radius, {});
}

double unit_ball_volume(int dim) {
  const double half = 0.5 * dim;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double Window::volume() const noexcept {
  if (kind_ == WindowKind::box) return std::pow(2.0 * extent_, dim_);
  return unit_ball_volume(dim_) * std::pow(extent_, dim_);
}

bool Window::contains(std::span<const double> x) const noexcept {
  if (x.size() != static_cast<std::size_t>(dim_)) return false;
  if (kind_ == WindowKind::box) {
    for (int i = 0; i < dim_; ++i) {
      if (!(std::abs(x[i] - center_[i]) <= extent_)) return false;
    }
    return true;
  }
  double r2 = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double d = x[i] - center_[i];
    r2 += d * d;
  }
  return r2 <= extent_ * extent_;
}

void Window::sample_uniform(Stream& rng, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(dim_)) {
    throw std::invalid_argument("sample_uniform: output has wrong dimension");
  }
  if (kind_ == WindowKind::box) {
    for (int i = 0; i < dim_; ++i) {
      out[i] = center_[i] + extent_ * (2.0 * rng.uniform() - 1.0);
    }
    return;
  }
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      out[i] = rng.normal();
      n2 += out[i] * out[i];
    }
  } while (!(n2 > 0.0));
  const double r = extent_ * std::pow(rng.uniform(), 1.0 / dim_);
  const double s = r / std::sqrt(n2);
  for (int i = 0; i < dim_; ++i) out[i] = center_[i] + out[i] * s;
}

double sample_mark(const MarkLaw& law, Stream& rng) {
  if (const auto* cat = std::get_if<CategoricalMarks>(&law)) {
    double total = 0.0;
    for (double w : cat->weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("negative mark weight");
      total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("empty categorical law");
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < cat->weights.size(); ++i) {
      if (u < cat->weights[i]) return static_cast<double>(i);
      u -= cat->weights[i];
    }
    return static_cast<double>(cat->weights.size() - 1);
  }
  const auto& uni = std::get<UniformMarks>(law);
  return rng.uniform(uni.lo, uni.hi);
}

void IntensitySpec::validate() const {
  if (!std::isfinite(t) || t < 0.0) {
    throw std::invalid_argument("intensity parameter t must be finite and >= 0");
  }
}

double IntensitySpec::total_mass(const Window& window) const {
  validate();
  const double factor = form == IntensityForm::scaled ? t : 1.0;
  switch (reference) {
    case ReferenceMeasure::lebesgue_on_window:
      return factor * window.volume();
    case ReferenceMeasure::line_measure_2d:
      if (window.kind() != WindowKind::ball || window.dim() != 2) {
        throw std::invalid_argument("line_measure_2d requires a 2D ball window");
      }
      return factor * 2.0 * window.extent();
    case ReferenceMeasure::line_measure_3d:
      if (window.kind() != WindowKind::ball || window.dim() != 3) {
        throw std::invalid_argument("line_measure_3d requires a 3D ball window");
      }
      return factor * std::numbers::pi * window.extent() * window.extent();
  }
  return 0.0;
}

std::string describe_normalization(ReferenceMeasure reference) {
  switch (reference) {
    case ReferenceMeasure::lebesgue_on_window:
      return "Lebesgue measure on the window";
    case ReferenceMeasure::line_measure_2d:
      return "lines {x: <x,(cos a, sin a)> = p}, a ~ dtheta/pi on [0,pi), "
             "p ~ Lebesgue on [-R,R]; mass of lines hitting B(0,R) = 2R";
    case ReferenceMeasure::line_measure_3d:
      return "lines with direction ~ uniform probability on the upper "
             "hemisphere, offset ~ Lebesgue on the orthogonal disk of radius R; "
             "mass of lines hitting B(0,R) = pi R^2";
  }
  return {};
}

// PointConfiguration --------------------------------------------------------

PointConfiguration::PointConfiguration(Window window, bool marked)
    : window_(std::move(window)), marked_(marked) {}

PointConfiguration PointConfiguration::from_points(
    Window window, const std::vector<std::vector<double>>& points) {
  PointConfiguration config(std::move(window));
  for (const auto& p : points) {
    if (!config.insert(p)) {
      throw std::invalid_argument("from_points: duplicate point");
    }
  }
  return config;
}

bool PointConfiguration::insert(std::span<const double> x, double mark) {
  if (x.size() != static_cast<std::size_t>(dim())) {
    throw std::invalid_argument("point has wrong dimension");
  }
  if (!window_.contains(x)) {
    throw std::invalid_argument("point lies outside the window");
  }
  const std::uint64_t h = hash_coords(x);
  auto [lo, hi] = index_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    const auto existing = coords(it->second);
    bool same = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (existing[i] != x[i]) {
        same = false;
        break;
      }
    }
    if (same) return false;
  }
  coords_.insert(coords_.end(), x.begin(), x.end());
  if (marked_) marks_.push_back(mark);
  index_.emplace(h, size_);
  ++size_;
  return true;
}

std::vector<PointView> PointConfiguration::views() const {
  std::vector<PointView> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back((*this)[i]);
  return out;
}

// Flats ---------------------------------------------------------------------

Flat Flat::line2d(double theta, double offset) {
  Flat f;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  f.base = {offset * c, offset * s};
  f.directions = {{-s, c}};
  return f;
}

Flat Flat::line(std::vector<double> point, std::vector<double> direction) {
  if (point.size() != direction.size() || point.empty()) {
    throw std::invalid_argument("line: point/direction dimension mismatch");
  }
  normalize(direction);
  const double proj = dot(point, direction);
  for (std::size_t i = 0; i < point.size(); ++i) {
    point[i] -= proj * direction[i];
  }
  Flat f;
  f.base = std::move(point);
  f.directions = {std::move(direction)};
  return f;
}

bool Flat::hits(const Window& ball) const {
  if (ball.kind() != WindowKind::ball) {
    throw std::invalid_argument("hitting predicate needs a ball window");
  }
  if (ball.dim() != ambient_dim()) return false;
  // base is the point of the flat closest to the origin (ball center).
  return std::sqrt(dot(base, base)) <= ball.extent();
}

bool Flat::well_formed(double tol) const {
  const double scale = std::max(1.0, std::sqrt(dot(base, base)));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i].size() != base.size()) return false;
    if (std::abs(dot(directions[i], directions[i]) - 1.0) > tol) return false;
    if (std::abs(dot(directions[i], base)) > tol * scale) return false;
    for (std::size_t j = i + 1; j < directions.size(); ++j) {
      if (std::abs(dot(directions[i], directions[j])) > tol) return false;
    }
  }
  return true;
}

FlatConfiguration::FlatConfiguration(Window window, int flat_dim)
    : window_(std::move(window)), flat_dim_(flat_dim) {
  if (window_.kind() != WindowKind::ball) {
    throw std::invalid_argument("flat processes are observed in ball windows");
  }
  if (flat_dim != 1) {
    throw std::invalid_argument("only line processes (i = 1) are supported");
  }
}

void FlatConfiguration::insert(Flat flat) {
  if (flat.ambient_dim() != ambient_dim() || flat.flat_dim() != flat_dim_) {
    throw std::invalid_argument("flat has wrong dimensions");
  }
  if (!flat.well_formed()) throw std::invalid_argument("flat is not orthonormal");
  if (!flat.hits(window_)) throw std::invalid_argument("flat misses the window");
  flats_.push_back(std::move(flat));
}

// PointMeasure --------------------------------------------------------------

PointMeasure::PointMeasure(Window window, double total_mass,
                           std::optional<MarkLaw> marks)
    : window_(std::move(window)), mass_(total_mass), marks_(std::move(marks)) {
  if (!std::isfinite(mass_) || mass_ < 0.0) {
    throw std::invalid_argument("measure mass must be finite and >= 0");
  }
}

PointMeasure::PointMeasure(const IntensitySpec& spec, const Window& window)
    : PointMeasure(window, spec.total_mass(window), spec.marks) {
  if (spec.reference != ReferenceMeasure::lebesgue_on_window) {
    throw std::invalid_argument("PointMeasure needs a Lebesgue reference");
  }
}

PointMeasure PointMeasure::normalized() const {
  return PointMeasure(window_, 1.0, marks_);
}

double PointMeasure::sample(Stream& rng, std::span<double> coords) const {
  window_.sample_uniform(rng, coords);
  return marks_ ? sample_mark(*marks_, rng) : 0.0;
}

// Samplers ------------------------------------------------------------------

PointConfiguration sample_points(const IntensitySpec& spec,
                                 const Window& window, std::uint64_t seed,
                                 std::uint64_t replicate) {
  if (spec.reference != ReferenceMeasure::lebesgue_on_window) {
    throw std::invalid_argument("sample_points needs a Lebesgue reference");
  }
  const double mass = spec.total_mass(window);
  Stream rng(seed, replicate);
  const std::uint64_t count = rng.poisson(mass);
  PointConfiguration config(window, spec.marks.has_value());
  config.seed = seed;
  config.replicate = replicate;
  std::vector<double> x(static_cast<std::size_t>(window.dim()));
  while (config.size() < count) {
    window.sample_uniform(rng, x);
    const double mark = spec.marks ? sample_mark(*spec.marks, rng) : 0.0;
    config.insert(x, mark);  // duplicates are redrawn
  }
  return config;
}

Flat sample_line(ReferenceMeasure reference, const Window& ball, Stream& rng) {
  const double radius = ball.extent();
  if (reference == ReferenceMeasure::line_measure_2d) {
    const double theta = std::numbers::pi * rng.uniform();
    const double offset = radius * (2.0 * rng.uniform() - 1.0);
    return Flat::line2d(theta, offset);
  }
  if (reference != ReferenceMeasure::line_measure_3d) {
    throw std::invalid_argument("sample_line needs a line reference measure");
  }
  std::vector<double> u(3);
  double n2 = 0.0;
  do {
    for (double& v : u) v = rng.normal();
    n2 = dot(u, u);
  } while (!(n2 > 0.0));
  for (double& v : u) v /= std::sqrt(n2);
  if (u[2] < 0.0) {
    for (double& v : u) v = -v;
  }
  std::vector<double> a = std::abs(u[0]) < 0.9 ? std::vector<double>{1, 0, 0}
                                                : std::vector<double>{0, 1, 0};
  const double au = dot(a, u);
  std::vector<double> e1{a[0] - au * u[0], a[1] - au * u[1], a[2] - au * u[2]};
  normalize(e1);
  const std::vector<double> e2{u[1] * e1[2] - u[2] * e1[1],
                               u[2] * e1[0] - u[0] * e1[2],
                               u[0] * e1[1] - u[1] * e1[0]};
  const double r = radius * std::sqrt(rng.uniform());
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  Flat f;
  f.base.resize(3);
  for (int i = 0; i < 3; ++i) {
    f.base[i] = r * std::cos(phi) * e1[i] + r * std::sin(phi) * e2[i];
  }
  f.directions = {u};
  return f;
}

FlatConfiguration sample_flats(const IntensitySpec& spec, const Window& window,
                               std::uint64_t seed, std::uint64_t replicate) {
  if (window.kind() != WindowKind::ball) {
    throw std::invalid_argument("sample_flats: box windows are not supported");
  }
  const bool ok2 = spec.reference == ReferenceMeasure::line_measure_2d &&
                   window.dim() == 2;
  const bool ok3 = spec.reference == ReferenceMeasure::line_measure_3d &&
                   window.dim() == 3;
  if (!ok2 && !ok3) {
    throw std::invalid_argument(
        "sample_flats: reference measure does not match the window dimension");
  }
  const double mass = spec.total_mass(window);
  Stream rng(seed, replicate);
  const std::uint64_t count = rng.poisson(mass);
  FlatConfiguration config(window, 1);
  config.seed = seed;
  config.replicate = replicate;
  for (std::uint64_t i = 0; i < count; ++i) {
    config.insert(sample_line(spec.reference, window, rng));
  }
  return config;
}

PointConfiguration sample_binomial(std::int64_t p, const Window& window,
                                   std::uint64_t seed, std::uint64_t replicate) {
  if (p < 0) throw std::invalid_argument("sample_binomial: p must be >= 0");
  Stream rng(seed, replicate);
  PointConfiguration config(window);
  config.seed = seed;
  config.replicate = replicate;
  std::vector<double> x(static_cast<std::size_t>(window.dim()));
  while (config.size() < static_cast<std::size_t>(p)) {
    window.sample_uniform(rng, x);
    config.insert(x);
  }
  return config;
}

}  // namespace pustat
