#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fiberaudit/geometry.hpp"

using namespace fiberaudit;
using geometry::Point;

TEST(Point, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Point(Vector(0)), InputError);
  EXPECT_THROW((Point{1.0, std::nan("")}), InputError);
  EXPECT_THROW((Point{std::numeric_limits<double>::infinity()}), InputError);
}

TEST(Point, EqualityRespectsDimension) {
  EXPECT_EQ((Point{1.0, 2.0}), (Point{1.0, 2.0}));
  EXPECT_FALSE((Point{1.0, 2.0}) == (Point{1.0, 2.0, 0.0}));
}

TEST(Distance, MatchesHandComputed) {
  EXPECT_DOUBLE_EQ(geometry::distance(Point{0.0, 0.0}, Point{3.0, 4.0}), 5.0);
  EXPECT_THROW(geometry::distance(Point{0.0}, Point{0.0, 1.0}), InputError);
}

TEST(FarthestPair, AgreesWithExhaustiveOracle) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(Point{g(rng), g(rng), g(rng)});
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const Vector d = pts[i].coords() - pts[j].coords();
        best = std::max(best, std::sqrt(d.dot(d)));
      }
    }
    const auto fp = geometry::farthest_pair(pts);
    EXPECT_NEAR(fp.distance, best, 1e-12);
    EXPECT_LT(fp.first_index, fp.second_index);
  }
}

TEST(FarthestPair, TiesResolveToLowestPair) {
  const std::vector<Point> pts{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  const auto fp = geometry::farthest_pair(pts);
  EXPECT_EQ(fp.first_index, 0u);
  EXPECT_EQ(fp.second_index, 3u);
}

TEST(SphereEmbedding, ValidatesBasis) {
  Matrix bad(3, 2);
  bad << 1, 1, 0, 0, 0, 0;
  EXPECT_THROW(geometry::SphereEmbedding(Point::zeros(3), 1.0, bad), InputError);
  EXPECT_THROW(geometry::SphereEmbedding::coordinate(Point::zeros(3), -1.0, 2), InputError);
  EXPECT_THROW(geometry::SphereEmbedding::coordinate(Point::zeros(2), 1.0, 3), ConfigError);
}

TEST(SphereEmbedding, FromVectorsOrthonormalizes) {
  const auto emb = geometry::SphereEmbedding::from_vectors(Point::zeros(3), 2.0,
                                                           {Vector{{1.0, 1.0, 0.0}}, Vector{{1.0, 0.0, 1.0}}});
  const Matrix gram = emb.basis().transpose() * emb.basis();
  EXPECT_LT((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(geometry::SphereEmbedding::from_vectors(Point::zeros(3), 1.0,
                                                       {Vector{{1.0, 0.0, 0.0}}, Vector{{2.0, 0.0, 0.0}}}),
               InputError);
}

TEST(SphereEmbedding, AntipodesAreDiameterApart) {
  const auto emb = geometry::SphereEmbedding::coordinate(Point{1.0, 2.0, 3.0}, 5.0, 3);
  const Vector u = Vector{{1.0, 2.0, 2.0}} / 3.0;
  const Point x = geometry::sphere_point(emb, u), y = geometry::antipode(emb, u);
  EXPECT_NEAR(geometry::distance(x, y), 10.0, 1e-12);
  EXPECT_EQ(geometry::midpoint(x, y), emb.center());
  EXPECT_THROW(geometry::sphere_point(emb, Vector{{1.0, 1.0, 0.0}}), InputError);
}

TEST(PolylinePath, ArcLengthParametrization) {
  const geometry::PolylinePath path({Point{0.0, 0.0}, Point{3.0, 0.0}, Point{3.0, 4.0}});
  EXPECT_DOUBLE_EQ(path.length(), 7.0);
  EXPECT_TRUE(path.at(1.5).isApprox(Vector{{1.5, 0.0}}));
  EXPECT_TRUE(path.at(5.0).isApprox(Vector{{3.0, 2.0}}));
  EXPECT_EQ(path.at(-1.0), (Vector{{0.0, 0.0}}));
  EXPECT_EQ(path.at(99.0), (Vector{{3.0, 4.0}}));
  EXPECT_THROW(geometry::PolylinePath({Point{0.0}, Point{0.0}}), InputError);
}

namespace {

// Dense check: minimum distance from b to the path, probing each segment
// at its closest point.
double min_clearance(const geometry::PolylinePath& path, const Vector& b) {
  double best = std::numeric_limits<double>::infinity();
  const auto& v = path.vertices();
  for (std::size_t i = 1; i < v.size(); ++i) {
    const Vector p = v[i - 1].coords(), q = v[i].coords();
    const Vector d = q - p;
    const double t = std::clamp((b - p).dot(d) / d.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (p + t * d - b).norm());
  }
  return best;
}

}  // namespace

TEST(DetourPath, StraightWhenClear) {
  const auto path = geometry::detour_path(Point{0.0, 0.0}, Point{4.0, 0.0}, Point{2.0, 3.0}, 1.0);
  EXPECT_EQ(path.vertices().size(), 2u);
}

TEST(DetourPath, KeepsClearanceForRandomConfigurations) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int checked = 0;
  while (checked < 50) {
    const Point a{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    const double r = 1.0;
    if (geometry::distance(a, b) < r || geometry::distance(c, b) < r) continue;
    const auto path = geometry::detour_path(a, c, b, r);
    EXPECT_EQ(path.start(), a);
    EXPECT_EQ(path.end(), c);
    EXPECT_GE(min_clearance(path, b.coords()), r);
    ++checked;
  }
}

TEST(DetourPath, CollinearCaseGoesAround) {
  for (int n : {2, 3, 5}) {
    Vector a = Vector::Zero(n), c = Vector::Zero(n), b = Vector::Zero(n);
    a[0] = -2.0;
    c[0] = 2.0;
    const auto path = geometry::detour_path(Point(a), Point(c), Point(b), 1.0);
    EXPECT_GE(min_clearance(path, b), 1.0);
    EXPECT_GT(path.length(), 2.0 + std::numbers::pi - 1e-3);
  }
}

TEST(DetourPath, RejectsEndpointsInsideBall) {
  EXPECT_THROW(geometry::detour_path(Point{0.0, 0.0}, Point{4.0, 0.0}, Point{0.5, 0.0}, 1.0), InputError);
  EXPECT_THROW(geometry::detour_path(Point{0.0}, Point{4.0}, Point{2.0}, 1.0), InputError);
}
