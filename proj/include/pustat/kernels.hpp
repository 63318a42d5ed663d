#ifndef PUSTAT_KERNELS_HPP_
#define PUSTAT_KERNELS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "pustat/estimate.hpp"
#include "pustat/process.hpp"

namespace pustat {

enum class Domain { points, flats };

using PointKernelFn = std::function<double(std::span<const PointView>)>;
using FlatKernelFn = std::function<double(std::span<const Flat* const>)>;

/// Metadata attached to a kernel.
struct KernelInfo {
  /// Smallest rho such that the kernel vanishes whenever two arguments are
  /// more than rho apart in Euclidean distance.
  std::optional<double> locality_radius;
  std::optional<double> sup_norm;
  bool nonnegative = false;
  /// Constant factor included in the kernel values (1/2, 1/(j+1)!, ...).
  double prefactor = 1.0;
};

/// A symmetric order-k function on k-tuples of points or of flats.
///
/// Kernels are immutable after construction and their evaluation is pure,
/// so one kernel can be shared across threads.
class Kernel {
 public:
  Kernel(std::string name, int order, PointKernelFn fn, KernelInfo info = {});
  Kernel(std::string name, int order, FlatKernelFn fn, KernelInfo info = {});

  const std::string& name() const noexcept { return name_; }
  int order() const noexcept { return order_; }
  Domain domain() const noexcept { return domain_; }
  const KernelInfo& info() const noexcept { return info_; }
  std::optional<double> locality_radius() const noexcept {
    return info_.locality_radius;
  }
  std::optional<double> sup_norm() const noexcept { return info_.sup_norm; }
  bool nonnegative() const noexcept { return info_.nonnegative; }
  double prefactor() const noexcept { return info_.prefactor; }

  /// Throws std::invalid_argument on arity or domain mismatch.
  double operator()(std::span<const PointView> args) const;
  double operator()(std::span<const Flat* const> args) const;

  /// Unchecked evaluation for hot loops (arity and domain already verified).
  double eval_points(std::span<const PointView> args) const {
    return point_fn_(args);
  }
  double eval_flats(std::span<const Flat* const> args) const {
    return flat_fn_(args);
  }

 private:
  std::string name_;
  int order_;
  Domain domain_;
  KernelInfo info_;
  PointKernelFn point_fn_;
  FlatKernelFn flat_fn_;
};

// Built-in kernel families ---------------------------------------------------

/// Edge indicator of the Gilbert graph, 1/2 * 1(|x - y| <= delta). With a
/// torus period L the distance is taken on the torus [0, L)^d (test kernel;
/// no Euclidean locality radius is reported in that case).
struct GilbertSpec {
  double delta = 0.1;
  std::optional<double> torus_period;
};
/// j-faces of the Vietoris-Rips complex: order j + 1,
/// 1/(j+1)! * 1(all pairwise distances <= delta).
struct RipsSpec {
  int face_dim = 1;
  double delta = 0.1;
};
/// 1(the k planar points are in convex position).
struct SylvesterSpec {
  int k = 4;
};
/// Pairs of 2D lines meeting inside the ball window: 1/2 * 1(h1 ∩ h2 ∩ W).
struct LineIntersectionSpec {
  double window_radius = 1.0;
};
/// Pairs of 3D lines at distance <= delta whose midpoint lies in the ball
/// window: 1/2 * 1(d(h1, h2) <= delta, m(h1, h2) ∈ W).
struct ProximitySpec {
  double delta = 0.1;
  double window_radius = 1.0;
};
struct ConstantSpec {
  int k = 1;
  Domain domain = Domain::points;
};
/// f(x, y) = g(x) g(y). The caller is responsible for the integral of g
/// against the intensity vanishing; see dejong_b for the check.
struct ProductDegenerateSpec {
  std::function<double(const PointView&)> g;
  double sup_abs_g = 1.0;
  std::string label = "g";
};

using KernelSpec =
    std::variant<GilbertSpec, RipsSpec, SylvesterSpec, LineIntersectionSpec,
                 ProximitySpec, ConstantSpec, ProductDegenerateSpec>;

/// Throws std::invalid_argument on bad parameters (delta <= 0, rips with
/// j < 1, sylvester with k < 3, ...).
Kernel make_kernel(const KernelSpec& spec);

/// g(x) = x_0 - center, the centered first coordinate; its integral against
/// any measure symmetric about `center` in the first coordinate vanishes.
ProductDegenerateSpec centered_linear_product(double center, double half_width);

/// f_alpha(x_1..x_k) = f(alpha x_1, ..., alpha x_k) on the spatial parts;
/// marks are untouched and the locality radius becomes rho / alpha.
Kernel rescale(const Kernel& kernel, double alpha);

// Geometry --------------------------------------------------------------------

/// Exact sign of the orientation determinant of (a, b, c): +1 for a
/// counter-clockwise turn, -1 clockwise, 0 collinear.
int orientation_sign(std::array<double, 2> a, std::array<double, 2> b,
                     std::array<double, 2> c);

struct ConvexPosition {
  bool convex = false;
  /// Three of the points are exactly collinear (or two coincide).
  bool degenerate = false;
};

/// Whether every point is a vertex of the convex hull of the tuple. Uses a
/// monotone-chain hull with exact orientation tests; a collinear triple
/// makes the result "not convex" with `degenerate` set.
ConvexPosition convex_position(std::span<const std::array<double, 2>> points);
ConvexPosition convex_position(std::span<const PointView> points);

struct LineGeometry {
  bool parallel = false;
  /// 2D: the lines meet at a point of the window.
  bool intersects_in_window = false;
  /// 2D: intersection point (valid unless parallel).
  std::array<double, 2> intersection{};
  /// 3D: distance between the lines and midpoint of the shortest segment.
  double distance = 0.0;
  std::array<double, 3> midpoint{};
};

/// Pairs closer to parallel than this (cross-product norm or determinant)
/// are reported as parallel.
inline constexpr double kParallelThreshold = 1e-12;

LineGeometry line_geometry(const Flat& h1, const Flat& h2, const Window& window);

// Rapid decrease ------------------------------------------------------------

/// Pilot density: product of k - 1 centered isotropic Gaussians on R^dim with
/// standard deviation `scale`.
struct RapidDecreaseSpec {
  double scale = 1.0;
  int p = 2;
  int dim = 2;
  std::optional<MarkLaw> marks;
};

/// Importance-sampling estimate of
///   A_p(f) = ∫ f(0, t_2..t_k, marks)^p kappa(t)^{1-p} dt dnu(marks).
/// `unstable` flags a divergent estimate.
Estimate rapid_decrease_constant(const Kernel& kernel,
                                 const RapidDecreaseSpec& spec,
                                 std::size_t mc_samples, std::uint64_t seed);

}  // namespace pustat

#endif  // PUSTAT_KERNELS_HPP_
