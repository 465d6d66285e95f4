#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fiberaudit/error.hpp"

namespace fiberaudit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace geometry {

/// A point of R^n with finite coordinates (n >= 1).
class Point {
 public:
  explicit Point(Vector coords) : coords_(std::move(coords)) {
    if (coords_.size() < 1) throw InputError("point must have at least one coordinate");
    if (!coords_.allFinite()) throw InputError("point coordinates must be finite");
  }
  Point(std::initializer_list<double> values)
      : Point(Eigen::Map<const Vector>(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

  static Point zeros(std::size_t n) { return Point(Vector::Zero(static_cast<Eigen::Index>(n))); }

  std::size_t dim() const { return static_cast<std::size_t>(coords_.size()); }
  const Vector& coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[static_cast<Eigen::Index>(i)]; }

  friend bool operator==(const Point& p, const Point& q) {
    return p.coords_.size() == q.coords_.size() && p.coords_ == q.coords_;
  }

 private:
  Vector coords_;
};

inline void require_same_dim(const Point& p, const Point& q) {
  if (p.dim() != q.dim()) {
    throw InputError("dimension mismatch: " + std::to_string(p.dim()) + " vs " + std::to_string(q.dim()));
  }
}

// Plain left-to-right accumulation so results are reproducible bit-for-bit
// independently of vectorization.
inline double distance(const Vector& p, const Vector& q) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Euclidean distance. Throws InputError on dimension mismatch.
inline double distance(const Point& p, const Point& q) {
  require_same_dim(p, q);
  return distance(p.coords(), q.coords());
}

inline Point midpoint(const Point& p, const Point& q) {
  require_same_dim(p, q);
  return Point(0.5 * (p.coords() + q.coords()));
}

struct FarthestPair {
  Point first;
  Point second;
  double distance;
  std::size_t first_index;
  std::size_t second_index;
};

/// Brute-force O(N^2) diameter of a finite set. Ties go to the
/// lexicographically lowest (i, j).
inline FarthestPair farthest_pair(const std::vector<Point>& points) {
  if (points.size() < 2) throw InputError("farthest_pair needs at least two points");
  const std::size_t n = points.front().dim();
  for (const auto& p : points) {
    if (p.dim() != n) throw InputError("farthest_pair: points of unequal dimension");
  }
  std::size_t bi = 0, bj = 1;
  double best = distance(points[0].coords(), points[1].coords());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = distance(points[i].coords(), points[j].coords());
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  return {points[bi], points[bj], best, bi, bj};
}

inline constexpr double kOrthonormalTol = 1e-12;
inline constexpr double kUnitTol = 1e-9;

/// An m-sphere isometrically embedded in R^n: center + radius * B u for
/// unit u in R^{m+1}, where the columns of B are orthonormal.
class SphereEmbedding {
 public:
  SphereEmbedding(Point center, double radius, Matrix basis)
      : center_(std::move(center)), radius_(radius), basis_(std::move(basis)) {
    if (!(radius_ > 0.0) || !std::isfinite(radius_)) throw InputError("sphere radius must be positive and finite");
    if (static_cast<std::size_t>(basis_.rows()) != center_.dim()) {
      throw InputError("sphere basis rows must match the ambient dimension");
    }
    if (basis_.cols() < 2) throw InputError("sphere carrier must have dimension at least 2");
    if (basis_.cols() > basis_.rows()) throw InputError("sphere carrier dimension exceeds ambient dimension");
    const Matrix gram = basis_.transpose() * basis_;
    const Matrix id = Matrix::Identity(basis_.cols(), basis_.cols());
    if ((gram - id).cwiseAbs().maxCoeff() > kOrthonormalTol) {
      throw InputError("sphere basis is not orthonormal");
    }
  }

  /// Carrier = span of the first `carrier_dim` coordinate axes.
  static SphereEmbedding coordinate(Point center, double radius, std::size_t carrier_dim) {
    const auto n = static_cast<Eigen::Index>(center.dim());
    if (static_cast<Eigen::Index>(carrier_dim) > n) {
      throw ConfigError("carrier dimension " + std::to_string(carrier_dim) + " exceeds ambient dimension " +
                        std::to_string(n));
    }
    Matrix basis = Matrix::Identity(n, static_cast<Eigen::Index>(carrier_dim));
    return SphereEmbedding(std::move(center), radius, std::move(basis));
  }

  /// Carrier spanned by arbitrary vectors, orthonormalized by modified Gram-Schmidt.
  static SphereEmbedding from_vectors(Point center, double radius, const std::vector<Vector>& vectors) {
    const auto n = static_cast<Eigen::Index>(center.dim());
    Matrix basis(n, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      if (vectors[k].size() != n) throw InputError("carrier vector dimension mismatch");
      Vector v = vectors[k];
      const double scale = v.norm();
      for (std::size_t j = 0; j < k; ++j) v -= basis.col(static_cast<Eigen::Index>(j)).dot(v) * basis.col(static_cast<Eigen::Index>(j));
      // second pass for numerical orthogonality
      for (std::size_t j = 0; j < k; ++j) v -= basis.col(static_cast<Eigen::Index>(j)).dot(v) * basis.col(static_cast<Eigen::Index>(j));
      const double norm = v.norm();
      if (!(scale > 0.0) || norm <= 1e-10 * scale) throw InputError("carrier vectors are linearly dependent");
      basis.col(static_cast<Eigen::Index>(k)) = v / norm;
    }
    return SphereEmbedding(std::move(center), radius, std::move(basis));
  }

  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const Matrix& basis() const { return basis_; }
  std::size_t ambient_dim() const { return center_.dim(); }
  /// m + 1 for an m-sphere.
  std::size_t carrier_dim() const { return static_cast<std::size_t>(basis_.cols()); }

 private:
  Point center_;
  double radius_;
  Matrix basis_;
};

inline void require_unit(const SphereEmbedding& emb, const Vector& u) {
  if (static_cast<std::size_t>(u.size()) != emb.carrier_dim()) {
    throw InputError("direction has dimension " + std::to_string(u.size()) + ", carrier has " +
                     std::to_string(emb.carrier_dim()));
  }
  if (!u.allFinite() || std::abs(u.norm() - 1.0) > kUnitTol) throw InputError("direction is not a unit vector");
}

inline Point sphere_point(const SphereEmbedding& emb, const Vector& u) {
  require_unit(emb, u);
  return Point(emb.center().coords() + emb.radius() * (emb.basis() * u));
}

inline Point antipode(const SphereEmbedding& emb, const Vector& u) {
  require_unit(emb, u);
  return Point(emb.center().coords() - emb.radius() * (emb.basis() * u));
}

/// Piecewise-linear curve parametrized by arc length.
class PolylinePath {
 public:
  explicit PolylinePath(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw InputError("path needs at least two vertices");
    cumulative_.reserve(vertices_.size());
    cumulative_.push_back(0.0);
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
      require_same_dim(vertices_[i - 1], vertices_[i]);
      const double seg = distance(vertices_[i - 1].coords(), vertices_[i].coords());
      if (!(seg > 0.0)) throw InputError("consecutive path vertices must be distinct");
      cumulative_.push_back(cumulative_.back() + seg);
    }
    if (!std::isfinite(cumulative_.back())) throw InputError("path length is not finite");
  }

  const std::vector<Point>& vertices() const { return vertices_; }
  double length() const { return cumulative_.back(); }
  const Point& start() const { return vertices_.front(); }
  const Point& end() const { return vertices_.back(); }

  /// Point at arc length s, clamped to [0, length()].
  Vector at(double s) const {
    if (s <= 0.0) return vertices_.front().coords();
    if (s >= length()) return vertices_.back().coords();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const auto i = static_cast<std::size_t>(it - cumulative_.begin());  // 1 <= i < size
    const double lam = (s - cumulative_[i - 1]) / (cumulative_[i] - cumulative_[i - 1]);
    return (1.0 - lam) * vertices_[i - 1].coords() + lam * vertices_[i].coords();
  }

 private:
  std::vector<Point> vertices_;
  std::vector<double> cumulative_;
};

inline constexpr double kDetourMargin = 1e-6;    // arc radius = R (1 + margin)
inline constexpr double kDetourSagitta = 1e-7;   // max chord sagitta, relative to R

namespace detail {

inline void push_distinct(std::vector<Point>& out, const Vector& v) {
  if (out.empty() || out.back().coords() != v) out.emplace_back(v);
}

}  // namespace detail

/// A polyline from a to c that never comes closer than `clearance` to b.
/// The part of the segment ac inside the ball is replaced by a circular arc
/// of radius clearance*(1 + kDetourMargin) around b.
inline PolylinePath detour_path(const Point& a, const Point& c, const Point& b, double clearance) {
  require_same_dim(a, c);
  require_same_dim(a, b);
  if (a.dim() < 2) throw InputError("detour_path needs dimension >= 2");
  if (!(clearance > 0.0) || !std::isfinite(clearance)) throw InputError("clearance must be positive and finite");
  if (distance(a, b) < clearance) throw InputError("detour_path: start point lies inside the clearance ball");
  if (distance(c, b) < clearance) throw InputError("detour_path: end point lies inside the clearance ball");
  if (a == c) throw InputError("detour_path: start and end coincide");

  const Vector& A = a.coords();
  const Vector& B = b.coords();
  const Vector& C = c.coords();
  const Vector d = C - A;
  const double len2 = d.squaredNorm();
  const double t_close = std::clamp((B - A).dot(d) / len2, 0.0, 1.0);
  if (distance(Vector(A + t_close * d), B) >= clearance) return PolylinePath({a, c});

  const double rd = clearance * (1.0 + kDetourMargin);
  const Vector w = A - B;
  const double qb = 2.0 * w.dot(d);
  const double qc = w.squaredNorm() - rd * rd;
  const double disc = std::max(0.0, qb * qb - 4.0 * len2 * qc);
  const double s1 = std::clamp((-qb - std::sqrt(disc)) / (2.0 * len2), 0.0, 1.0);
  const double s2 = std::clamp((-qb + std::sqrt(disc)) / (2.0 * len2), 0.0, 1.0);

  const Vector u1 = (Vector(A + s1 * d) - B).normalized();
  const Vector u2 = (Vector(A + s2 * d) - B).normalized();

  double angle = 0.0;
  Vector e2 = u2 - u1.dot(u2) * u1;
  if (e2.norm() > 1e-12) {
    e2.normalize();
    angle = std::atan2(u2.dot(e2), u1.dot(u2));
  } else if (u1.dot(u2) < 0.0) {
    // a, b, c collinear: take the plane spanned by the segment and the
    // first coordinate axis not parallel to it.
    const Vector dir = d / std::sqrt(len2);
    for (Eigen::Index k = 0; k < dir.size(); ++k) {
      if (std::abs(dir[k]) < 1.0 - 1e-12) {
        e2 = Vector::Unit(dir.size(), k);
        e2 -= e2.dot(u1) * u1;
        e2 -= e2.dot(u1) * u1;
        e2.normalize();
        break;
      }
    }
    angle = std::numbers::pi;
  }

  const double max_step = 2.0 * std::acos(1.0 - kDetourSagitta * clearance / rd);
  const auto steps = static_cast<std::size_t>(std::ceil(angle / max_step)) + 1;

  std::vector<Point> verts;
  verts.reserve(steps + 4);
  verts.push_back(a);
  detail::push_distinct(verts, B + rd * u1);
  for (std::size_t i = 1; i < steps; ++i) {
    const double phi = angle * static_cast<double>(i) / static_cast<double>(steps);
    detail::push_distinct(verts, B + rd * (std::cos(phi) * u1 + std::sin(phi) * e2));
  }
  detail::push_distinct(verts, B + rd * u2);
  detail::push_distinct(verts, C);
  return PolylinePath(std::move(verts));
}

}  // namespace geometry
}  // namespace fiberaudit
