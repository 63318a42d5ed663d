#ifndef PUSTAT_PROCESS_HPP_
#define PUSTAT_PROCESS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pustat/random.hpp"

namespace pustat {

enum class WindowKind { box, ball };

/// Observation region: an axis-aligned cube [c - w, c + w]^d or a ball of
/// radius R centered at c. The center defaults to the origin.
class Window {
 public:
  static Window box(int dim, double half_width);
  static Window box(int dim, double half_width, std::vector<double> center);
  /// [0, 1]^d.
  static Window unit_cube(int dim);
  /// [-t^{1/d}, t^{1/d}]^d, the growing window of the restricted set-up.
  static Window growing_box(int dim, double t);
  static Window ball(int dim, double radius);

  WindowKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  /// Half-width for boxes, radius for balls.
  double extent() const noexcept { return extent_; }
  const std::vector<double>& center() const noexcept { return center_; }
  double volume() const noexcept;

  bool contains(std::span<const double> x) const noexcept;
  /// Writes a uniform point of the window into `out` (size dim()).
  void sample_uniform(Stream& rng, std::span<double> out) const;

  bool operator==(const Window&) const = default;

 private:
  Window(WindowKind kind, int dim, double extent, std::vector<double> center);

  WindowKind kind_;
  int dim_;
  double extent_;
  std::vector<double> center_;
};

/// Volume of the unit ball in R^d.
double unit_ball_volume(int dim);

/// Marks drawn i.i.d. from a categorical law; the mark value is the
/// category index (0, 1, ...). Weights need not be normalized.
struct CategoricalMarks {
  std::vector<double> weights;
};
/// Marks drawn i.i.d. uniform on [lo, hi).
struct UniformMarks {
  double lo = 0.0;
  double hi = 1.0;
};
using MarkLaw = std::variant<CategoricalMarks, UniformMarks>;

double sample_mark(const MarkLaw& law, Stream& rng);

enum class IntensityForm {
  scaled,      // mu_t = t * mu_ref restricted to the window
  restricted,  // mu_t = 1_{X_t} mu_ref, the window plays the role of X_t
};

enum class ReferenceMeasure {
  lebesgue_on_window,
  line_measure_2d,  // theta ~ U[0, pi), signed offset ~ U[-R, R]; mass 2R
  line_measure_3d,  // direction ~ U(hemisphere), offset ~ U(disk R); mass pi R^2
};

struct IntensitySpec {
  IntensityForm form = IntensityForm::scaled;
  double t = 1.0;
  std::optional<MarkLaw> marks;
  ReferenceMeasure reference = ReferenceMeasure::lebesgue_on_window;

  /// mu_t of the whole window (closed form for every reference measure).
  double total_mass(const Window& window) const;
  /// Throws std::invalid_argument for non-finite or negative t.
  void validate() const;
};

/// Human-readable normalization of the reference measure, written into
/// experiment metadata.
std::string describe_normalization(ReferenceMeasure reference);

/// Non-owning view of one point of a configuration (spatial part plus mark).
struct PointView {
  std::span<const double> x;
  double mark = 0.0;
};

/// A finite set of distinct points in a window.
class PointConfiguration {
 public:
  explicit PointConfiguration(Window window, bool marked = false);

  /// Builds a configuration from explicit coordinates; throws if a point is
  /// outside the window or repeated.
  static PointConfiguration from_points(
      Window window, const std::vector<std::vector<double>>& points);

  /// Inserts a point. Returns false (and leaves the configuration unchanged)
  /// if a point with identical coordinates is already present. Throws
  /// std::invalid_argument if x is outside the window or has wrong size.
  bool insert(std::span<const double> x, double mark = 0.0);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  int dim() const noexcept { return window_.dim(); }
  bool marked() const noexcept { return marked_; }
  const Window& window() const noexcept { return window_; }

  std::span<const double> coords(std::size_t i) const noexcept {
    return {coords_.data() + i * static_cast<std::size_t>(dim()),
            static_cast<std::size_t>(dim())};
  }
  double mark(std::size_t i) const noexcept {
    return marked_ ? marks_[i] : 0.0;
  }
  PointView operator[](std::size_t i) const noexcept {
    return {coords(i), mark(i)};
  }
  std::vector<PointView> views() const;

  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;

 private:
  Window window_;
  bool marked_;
  std::size_t size_ = 0;
  std::vector<double> coords_;
  std::vector<double> marks_;
  std::unordered_multimap<std::uint64_t, std::size_t> index_;
};

/// An affine flat: base point in the orthogonal complement of the span of
/// the orthonormal direction vectors.
struct Flat {
  std::vector<double> base;
  std::vector<std::vector<double>> directions;

  /// 2D line {x : <x, (cos theta, sin theta)> = offset}.
  static Flat line2d(double theta, double offset);
  /// Line through `point` with direction `direction` (normalized here); the
  /// stored base point is the foot of the perpendicular from the origin.
  static Flat line(std::vector<double> point, std::vector<double> direction);

  int ambient_dim() const noexcept { return static_cast<int>(base.size()); }
  int flat_dim() const noexcept { return static_cast<int>(directions.size()); }
  /// Hitting predicate for a ball window.
  bool hits(const Window& ball) const;
  /// Orthonormal directions and base orthogonal to them, within tol.
  bool well_formed(double tol = 1e-12) const;
};

/// A finite collection of lines hitting a ball window.
class FlatConfiguration {
 public:
  FlatConfiguration(Window window, int flat_dim = 1);

  /// Throws std::invalid_argument if the flat misses the window, has the
  /// wrong dimensions, or is not well formed.
  void insert(Flat flat);

  std::size_t size() const noexcept { return flats_.size(); }
  bool empty() const noexcept { return flats_.empty(); }
  int ambient_dim() const noexcept { return window_.dim(); }
  int flat_dim() const noexcept { return flat_dim_; }
  const Window& window() const noexcept { return window_; }
  const Flat& operator[](std::size_t i) const noexcept { return flats_[i]; }
  const std::vector<Flat>& flats() const noexcept { return flats_; }

  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;

 private:
  Window window_;
  int flat_dim_;
  std::vector<Flat> flats_;
};

/// The intensity measure of a point process restricted to its window:
/// total mass times the uniform law on the window, times the mark law.
class PointMeasure {
 public:
  PointMeasure(Window window, double total_mass,
               std::optional<MarkLaw> marks = std::nullopt);
  PointMeasure(const IntensitySpec& spec, const Window& window);

  const Window& window() const noexcept { return window_; }
  int dim() const noexcept { return window_.dim(); }
  double total_mass() const noexcept { return mass_; }
  const std::optional<MarkLaw>& marks() const noexcept { return marks_; }
  /// Same window and marks, total mass 1.
  PointMeasure normalized() const;

  /// Draws from the normalized measure: coordinates into `coords`, mark
  /// returned (0 when unmarked).
  double sample(Stream& rng, std::span<double> coords) const;

 private:
  Window window_;
  double mass_;
  std::optional<MarkLaw> marks_;
};

/// Poisson process with intensity `spec` on the window. Deterministic in
/// (spec, window, seed, replicate).
PointConfiguration sample_points(const IntensitySpec& spec,
                                 const Window& window, std::uint64_t seed,
                                 std::uint64_t replicate);

/// Poisson line process (i = 1) hitting a ball window.
FlatConfiguration sample_flats(const IntensitySpec& spec, const Window& window,
                               std::uint64_t seed, std::uint64_t replicate);

/// One line from the normalized line measure of `reference` on the ball.
Flat sample_line(ReferenceMeasure reference, const Window& ball, Stream& rng);

/// Exactly p i.i.d. uniform points in the window.
PointConfiguration sample_binomial(std::int64_t p, const Window& window,
                                   std::uint64_t seed, std::uint64_t replicate);

}  // namespace pustat

#endif  // PUSTAT_PROCESS_HPP_
