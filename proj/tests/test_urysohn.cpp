#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fiberaudit/maps.hpp"
#include "fiberaudit/urysohn.hpp"

using namespace fiberaudit;
using geometry::Point;

namespace {

// Algebraic least-squares circle fit (Kasa): x^2 + y^2 + D x + E y + F = 0.
std::pair<Vector, double> fit_circle(const std::vector<Vector>& pts) {
  Matrix a(static_cast<Eigen::Index>(pts.size()), 3);
  Vector rhs(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = pts[i][0];
    a(r, 1) = pts[i][1];
    a(r, 2) = 1.0;
    rhs[r] = -(pts[i][0] * pts[i][0] + pts[i][1] * pts[i][1]);
  }
  const Vector s = a.colPivHouseholderQr().solve(rhs);
  const Vector c{{-s[0] / 2.0, -s[1] / 2.0}};
  return {c, std::sqrt(c.squaredNorm() - s[2])};
}

// Points of the level set along rays from a, found by bisection on the ray.
// Levels above 1/2 enclose b instead: swap the roles.
std::vector<Vector> level_points(const Vector& a_in, const Vector& b_in, double t_in) {
  const bool swap = t_in > 0.5;
  const Vector a = swap ? b_in : a_in, b = swap ? a_in : b_in;
  const double t = swap ? 1.0 - t_in : t_in;
  std::vector<Vector> out;
  for (int k = 0; k < 72; ++k) {
    const double phi = 2.0 * M_PI * k / 72.0;
    const Vector dir{{std::cos(phi), std::sin(phi)}};
    double lo = 0.0, hi = 1e3;
    if ((maps::urysohn_value(a, b, Vector(a + hi * dir)) - t) * (0.0 - t) > 0.0) continue;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (maps::urysohn_value(a, b, Vector(a + mid * dir)) < t) lo = mid; else hi = mid;
    }
    out.push_back(a + lo * dir);
  }
  return out;
}

}  // namespace

TEST(Apollonius, ClosedFormMatchesCircleFit) {
  const Vector a{{0.0, 0.0}}, b{{4.0, 0.0}};
  for (double t : {0.1, 0.3, 0.45, 0.55, 0.8, 0.95}) {
    const auto g = urysohn::fiber_geometry(Point(a), Point(b), t);
    ASSERT_TRUE(g.is_sphere());
    const auto pts = level_points(a, b, t);
    ASSERT_GE(pts.size(), 10u);
    const auto [c, r] = fit_circle(pts);
    EXPECT_NEAR(g.sphere().center[0], c[0], 1e-8) << t;
    EXPECT_NEAR(g.sphere().center[1], c[1], 1e-8) << t;
    EXPECT_NEAR(g.sphere().radius, r, 1e-8) << t;
  }
}

TEST(Apollonius, ReferenceLevel) {
  const auto g = urysohn::fiber_geometry(Point{0.0, 0.0}, Point{4.0, 0.0}, 0.8);
  EXPECT_NEAR(g.sphere().center[0], 16.0 / 3.0, 1e-14);
  EXPECT_NEAR(g.sphere().radius, 8.0 / 3.0, 1e-14);
}

TEST(Apollonius, SpecialLevels) {
  const Point a{1.0, 2.0, 3.0}, b{3.0, 2.0, 3.0};
  const auto half = urysohn::fiber_geometry(a, b, 0.5);
  ASSERT_FALSE(half.is_sphere());
  EXPECT_EQ(half.hyperplane().point, (Point{2.0, 2.0, 3.0}));
  EXPECT_TRUE(half.hyperplane().normal.isApprox(Vector{{1.0, 0.0, 0.0}}));
  EXPECT_EQ(urysohn::fiber_geometry(a, b, 0.0).sphere().radius, 0.0);
  EXPECT_EQ(urysohn::fiber_geometry(a, b, 1.0).sphere().center, b);
  EXPECT_THROW(urysohn::fiber_geometry(a, b, 1.5), InputError);
  EXPECT_THROW(urysohn::fiber_geometry(a, a, 0.2), std::invalid_argument);
}

TEST(Apollonius, RadiusIsSymmetricInLevel) {
  for (double t : {0.05, 0.2, 0.4, 0.49}) {
    EXPECT_NEAR(urysohn::fiber_radius(4.0, t), urysohn::fiber_radius(4.0, 1.0 - t), 1e-9 * urysohn::fiber_radius(4.0, t));
  }
}

TEST(SmallLevels, DiameterEqualsThresholdAtEnds) {
  const Point a{0.0, 0.0}, b{4.0, 0.0};
  const double M = 1.0;
  const auto lv = urysohn::small_levels(a, b, M);
  EXPECT_FALSE(lv.merged);
  EXPECT_NEAR(2.0 * urysohn::fiber_radius(4.0, lv.lower_end), M, 1e-9);
  EXPECT_NEAR(lv.upper_end, 1.0 - lv.lower_end, 1e-15);
  // Oracle: k / (1 - k^2) * d = M / 2 with k^2 = t / (1 - t).
  const double k = (-4.0 + std::sqrt(16.0 + 4.0 * 0.25)) / (2.0 * 0.5);
  EXPECT_NEAR(lv.lower_end, k * k / (1.0 + k * k), 1e-10);
}

TEST(SmallLevels, SeparationFormula) {
  const Point a{0.0, 0.0}, b{4.0, 0.0};
  const auto lv = urysohn::small_levels(a, b, 1.0);
  const double k = std::sqrt(lv.lower_end / (1.0 - lv.lower_end));
  EXPECT_NEAR(urysohn::region_separation(a, b, 1.0), 4.0 * (1.0 - k) / (1.0 + k), 1e-9);
}

TEST(FiberPolyline, CirclePointsLieOnLevel) {
  const Point a{0.0, 0.0}, b{4.0, 0.0};
  const auto pts = urysohn::fiber_polyline(a, b, 0.3, 64, {-8, 12, -10, 10});
  ASSERT_EQ(pts.size(), 64u);
  for (const auto& p : pts) EXPECT_NEAR(maps::urysohn_value(a, b, p), 0.3, 1e-12);
  const auto line = urysohn::fiber_polyline(a, b, 0.5, 64, {-8, 12, -10, 10});
  ASSERT_EQ(line.size(), 2u);
  EXPECT_EQ(line[0], (Point{2.0, -10.0}));
}
