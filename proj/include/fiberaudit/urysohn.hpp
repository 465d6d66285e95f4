#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "fiberaudit/error.hpp"
#include "fiberaudit/geometry.hpp"

// Level sets of u(x) = d(x,a)^2 / (d(x,a)^2 + d(x,b)^2).
//
// u(x) = t  <=>  d(x,a) / d(x,b) = k  with  k^2 = t / (1 - t).
// For k != 1 this is the Apollonius sphere with
//   center = (a - k^2 b) / (1 - k^2),   radius = k d(a,b) / |1 - k^2|,
// and for k = 1 (t = 1/2) the perpendicular bisector hyperplane of ab.
// Levels 0 and 1 are the single points a and b.
namespace fiberaudit::urysohn {

using geometry::Point;

struct Sphere {
  Point center;
  double radius;
};
struct Hyperplane {
  Point point;
  Vector normal;  // unit, along b - a
};

struct ApolloniusFiber {
  double level;
  std::variant<Sphere, Hyperplane> shape;

  bool is_sphere() const { return std::holds_alternative<Sphere>(shape); }
  const Sphere& sphere() const { return std::get<Sphere>(shape); }
  const Hyperplane& hyperplane() const { return std::get<Hyperplane>(shape); }
};

inline void require_distinct(const Point& a, const Point& b) {
  geometry::require_same_dim(a, b);
  if (a == b) throw ConfigError("urysohn geometry requires a != b");
}

/// Radius of the level-t fiber (infinite at t = 1/2).
inline double fiber_radius(double separation, double t) {
  if (t == 0.5) return std::numeric_limits<double>::infinity();
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double k2 = t / (1.0 - t);
  return std::sqrt(k2) * separation / std::abs(1.0 - k2);
}

inline ApolloniusFiber fiber_geometry(const Point& a, const Point& b, double t) {
  require_distinct(a, b);
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("urysohn level must lie in [0, 1]");
  if (t == 0.0) return {t, Sphere{a, 0.0}};
  if (t == 1.0) return {t, Sphere{b, 0.0}};
  if (t == 0.5) {
    return {t, Hyperplane{geometry::midpoint(a, b), (b.coords() - a.coords()).normalized()}};
  }
  const double k2 = t / (1.0 - t);
  const Vector center = (a.coords() - k2 * b.coords()) / (1.0 - k2);
  return {t, Sphere{Point(center), fiber_radius(geometry::distance(a, b), t)}};
}

inline constexpr double kLevelTol = 1e-12;

/// Levels whose fibers are small (diameter < M): [0, lower_end) around a
/// and (upper_end, 1] around b.
struct SmallLevels {
  double lower_end;
  double upper_end;
  // Always false: fiber radius diverges at t = 1/2, so the two intervals
  // can never meet for finite M.
  bool merged = false;
};

/// Radius is strictly increasing on (0, 1/2) from 0 to infinity, so
/// radius(t) = M/2 has one root there; bisection to kLevelTol. The upper
/// interval follows from the a <-> b, t <-> 1 - t symmetry.
inline SmallLevels small_levels(const Point& a, const Point& b, double M) {
  require_distinct(a, b);
  if (!(M > 0.0) || !std::isfinite(M)) throw InputError("M must be positive and finite");
  const double d = geometry::distance(a, b);
  const double target = 0.5 * M;
  double lo = 0.0, hi = 0.5;
  while (hi - lo > kLevelTol) {
    const double mid = 0.5 * (lo + hi);
    if (fiber_radius(d, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  return {t, 1.0 - t, false};
}

/// Gap between the two closed regions swept by the small fibers: the balls
/// bounded by the boundary-level spheres. Equal to d (1 - k) / (1 + k) for
/// the boundary ratio k.
inline double region_separation(const Point& a, const Point& b, double M) {
  const auto levels = small_levels(a, b, M);
  if (levels.merged) throw InputError("small-level intervals merged; separation not applicable");
  const auto lower = fiber_geometry(a, b, levels.lower_end).sphere();
  const auto upper = fiber_geometry(a, b, levels.upper_end).sphere();
  return std::max(0.0, geometry::distance(lower.center, upper.center) - lower.radius - upper.radius);
}

/// Unit vector orthogonal to b - a: the first coordinate axis not parallel
/// to it, orthogonalized.
inline Vector in_plane_normal(const Vector& dir) {
  for (Eigen::Index k = 0; k < dir.size(); ++k) {
    if (std::abs(dir[k]) < 1.0 - 1e-12) {
      Vector e = Vector::Unit(dir.size(), k);
      e -= e.dot(dir) * dir;
      return e.normalized();
    }
  }
  throw InputError("no orthogonal direction in dimension 1");
}

/// Axis-aligned plotting window in the plane through a, b.
struct PlotWindow {
  double u_min, u_max, v_min, v_max;  // coordinates along (b - a) and its in-plane normal, from a
};

/// Discretization of the level-t fiber intersected with the plane spanned
/// by b - a and in_plane_normal: `count` circle points for a sphere, the two
/// window-clipped endpoints of the bisector line otherwise.
inline std::vector<Point> fiber_polyline(const Point& a, const Point& b, double t, std::size_t count,
                                         const PlotWindow& window) {
  require_distinct(a, b);
  if (a.dim() < 2) throw InputError("fiber drawing needs dimension >= 2");
  const auto fiber = fiber_geometry(a, b, t);
  const Vector e1 = (b.coords() - a.coords()).normalized();
  const Vector e2 = in_plane_normal(e1);
  std::vector<Point> pts;
  if (fiber.is_sphere()) {
    const auto& s = fiber.sphere();
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      pts.emplace_back(s.center.coords() + s.radius * (std::cos(phi) * e1 + std::sin(phi) * e2));
    }
    return pts;
  }
  const double u = 0.5 * geometry::distance(a, b);  // bisector is u = d/2 in window coordinates
  if (u < window.u_min || u > window.u_max) return pts;
  pts.emplace_back(a.coords() + u * e1 + window.v_min * e2);
  pts.emplace_back(a.coords() + u * e1 + window.v_max * e2);
  return pts;
}

}  // namespace fiberaudit::urysohn
