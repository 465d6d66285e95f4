#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fiberaudit/error.hpp"
#include "fiberaudit/geometry.hpp"
#include "fiberaudit/maps.hpp"
#include "fiberaudit/optimize.hpp"
#include "fiberaudit/parallel.hpp"
#include "fiberaudit/sampling.hpp"

// Antipodal collision search. For f : R^n -> R^m with n > m and any
// m-sphere embedded in R^n, some antipodal pair (x, x') has f(x) = f(x'),
// so f has a fiber of diameter at least 2 * radius. These routines find
// such pairs numerically.
namespace fiberaudit::collision {

using geometry::Point;
using geometry::SphereEmbedding;
using maps::MapEval;

/// Evidence of a large fiber: antipodal x, x' with |f(x) - f(x')| = defect.
struct CollisionWitness {
  Point x;
  Point x_prime;
  double separation;
  double defect;
  bool converged;
  std::size_t evaluations;
  std::size_t iterations = 0;   // bisection steps or descent iterations of the winning start
  std::size_t start_index = 0;  // winning multistart start
  Vector direction;             // u in the carrier, x = center + radius * B u
};

inline void require_compatible(const MapEval& f, const SphereEmbedding& emb) {
  if (emb.ambient_dim() != f.domain_dim()) {
    throw InputError("sphere lives in R^" + std::to_string(emb.ambient_dim()) + " but the map has domain R^" +
                     std::to_string(f.domain_dim()));
  }
  if (f.codomain_dim() + 1 > f.domain_dim()) {
    throw ConfigError("antipodal search needs m + 1 <= n (got n = " + std::to_string(f.domain_dim()) +
                      ", m = " + std::to_string(f.codomain_dim()) + ")");
  }
}

/// |f(x) - f(-x)| for x = sphere_point(emb, u).
inline double antipodal_defect(const MapEval& f, const SphereEmbedding& emb, const Vector& u) {
  require_compatible(f, emb);
  const Point x = geometry::sphere_point(emb, u);
  const Point xp = geometry::antipode(emb, u);
  return geometry::distance(f(x.coords()), f(xp.coords()));
}

/// Builds the witness for direction u, re-evaluating f at both points.
inline CollisionWitness make_witness(const MapEval& f, const SphereEmbedding& emb, const Vector& u, double tol,
                                     std::size_t evaluations) {
  Vector unit = u / u.norm();
  Point x = geometry::sphere_point(emb, unit);
  Point xp = geometry::antipode(emb, unit);
  const double defect = geometry::distance(f(x.coords()), f(xp.coords()));
  const double sep = geometry::distance(x, xp);
  return CollisionWitness{std::move(x), std::move(xp), sep, defect, defect <= tol, evaluations + 2, 0, 0,
                          std::move(unit)};
}

/// Default tolerance 1e-9 (1 + |f(center)|).
inline double default_tolerance(const MapEval& f, const Point& center) {
  return 1e-9 * (1.0 + f(center.coords()).norm());
}

struct BisectionOptions {
  std::size_t scan_points = 64;    // samples of g on [0, pi)
  std::size_t max_iterations = 200;
};

/// m = 1 collision on a circle. g(t) = f(x(t)) - f(x(t + pi)) is odd under
/// t -> t + pi, so it changes sign on [0, pi]; the scan brackets the first
/// sign change and bisection closes it to |g| <= tol.
inline CollisionWitness find_collision_bisection(const MapEval& f, const SphereEmbedding& emb, double tol,
                                                 const BisectionOptions& opt = {}) {
  require_compatible(f, emb);
  if (f.codomain_dim() != 1) throw ConfigError("bisection collision search needs a scalar map");
  if (emb.carrier_dim() != 2) throw ConfigError("bisection collision search needs a circle (carrier dimension 2)");
  if (!(tol >= 0.0)) throw InputError("tolerance must be nonnegative");
  if (opt.scan_points < 1) throw InputError("scan_points must be positive");

  std::size_t evals = 0;
  const Vector& c = emb.center().coords();
  const double r = emb.radius();
  const Vector b0 = emb.basis().col(0);
  const Vector b1 = emb.basis().col(1);
  auto g = [&](double t) {
    const Vector w = r * (std::cos(t) * b0 + std::sin(t) * b1);
    evals += 2;
    return f(Vector(c + w))[0] - f(Vector(c - w))[0];
  };
  auto direction = [](double t) {
    Vector u(2);
    u << std::cos(t), std::sin(t);
    return u;
  };
  auto finish = [&](double t, std::size_t iters) {
    auto w = make_witness(f, emb, direction(t), tol, evals);
    w.iterations = iters;
    return w;
  };

  const double step = std::numbers::pi / static_cast<double>(opt.scan_points);
  std::vector<double> scan(opt.scan_points + 1);
  for (std::size_t k = 0; k < opt.scan_points; ++k) {
    scan[k] = g(step * static_cast<double>(k));
    if (std::abs(scan[k]) <= tol) return finish(step * static_cast<double>(k), 0);
  }
  scan[opt.scan_points] = -scan[0];

  std::size_t k = 0;
  while (k < opt.scan_points && (scan[k] > 0.0) == (scan[k + 1] > 0.0)) ++k;
  double lo = step * static_cast<double>(k);
  double hi = k + 1 == opt.scan_points ? std::numbers::pi : step * static_cast<double>(k + 1);
  double g_lo = scan[k];
  double best_t = lo;
  double best_g = std::abs(g_lo);

  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;  // interval exhausted at double resolution
    const double gm = g(mid);
    if (std::abs(gm) < best_g) {
      best_g = std::abs(gm);
      best_t = mid;
    }
    if (std::abs(gm) <= tol) return finish(mid, it);
    if ((gm > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
    }
  }
  return finish(best_t, opt.max_iterations);
}

struct MultistartOptions {
  std::size_t starts = 0;       // 0 -> 8 (m + 1)
  std::size_t budget = 500;     // map evaluations per start
  std::uint64_t seed = sampling::kDefaultSeed;
  std::size_t workers = 0;      // 0 -> parallel::worker_count()
};

namespace detail {

/// Residual u -> f(c + r B u) - f(c - r B u) on the unit sphere of the carrier.
class AntipodalProblem {
 public:
  AntipodalProblem(const MapEval& f, const SphereEmbedding& emb) : f_(f), emb_(emb) {}

  Vector residual(const Vector& u) const {
    const Vector w = emb_.radius() * (emb_.basis() * u);
    const Vector& c = emb_.center().coords();
    return f_(Vector(c + w)) - f_(Vector(c - w));
  }
  Matrix residual_jacobian(const Vector& u) const {
    const Vector w = emb_.radius() * (emb_.basis() * u);
    const Vector& c = emb_.center().coords();
    const Matrix rb = emb_.radius() * emb_.basis();
    return (f_.jacobian(Vector(c + w)) + f_.jacobian(Vector(c - w))) * rb;
  }
  Matrix tangent_basis(const Vector& u) const { return optimize::sphere_tangent_basis(u); }
  Vector retract(const Vector& u, const Vector& step) const {
    return (u + optimize::sphere_tangent_basis(u) * step).normalized();
  }
  double max_step() const { return 0.5; }
  std::size_t residual_cost() const { return 2; }
  std::size_t jacobian_cost() const { return 2 * f_.jacobian_cost(); }

 private:
  const MapEval& f_;
  const SphereEmbedding& emb_;
};

}  // namespace detail

/// Minimizes |f(x) - f(x')|^2 over antipodal pairs from quasi-random starts.
/// Start i depends only on (seed, i); the best start wins, ties to the
/// lowest index, so the result is independent of the worker count.
/// Never throws for lack of convergence: the witness reports converged = false.
inline CollisionWitness find_collision_multistart(const MapEval& f, const SphereEmbedding& emb, double tol,
                                                  const MultistartOptions& opt = {}) {
  require_compatible(f, emb);
  if (!(tol >= 0.0)) throw InputError("tolerance must be nonnegative");
  if (opt.budget < 1) throw InputError("budget must be at least 1");
  const std::size_t starts = opt.starts == 0 ? 8 * (f.codomain_dim() + 1) : opt.starts;

  const sampling::SphereDirections directions(emb.carrier_dim(), opt.seed);
  const detail::AntipodalProblem problem(f, emb);
  optimize::DescentOptions dopt;
  dopt.tol = tol;
  dopt.budget = opt.budget;
  dopt.use_derivatives = f.smooth();

  std::vector<optimize::DescentResult> results(starts);
  parallel::for_each_index(
      starts, [&](std::size_t i) { results[i] = optimize::least_squares_descent(problem, directions.direction(i), dopt); },
      opt.workers == 0 ? parallel::worker_count() : opt.workers);

  std::size_t best = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < starts; ++i) {
    total += results[i].evaluations;
    if (results[i].residual_norm < results[best].residual_norm) best = i;
  }
  auto w = make_witness(f, emb, results[best].z, tol, total);
  w.iterations = results[best].iterations;
  w.start_index = best;
  return w;
}

struct WitnessOptions {
  std::optional<double> tol;                 // default_tolerance() when unset
  std::optional<std::vector<Vector>> carrier;  // default: first m + 1 coordinate axes
  std::optional<Point> center;               // default: origin
  BisectionOptions bisection;
  MultistartOptions multistart;
};

/// Dispatches to bisection (m = 1) or multistart (m > 1).
inline CollisionWitness search_sphere(const MapEval& f, const SphereEmbedding& emb, double tol,
                                      const WitnessOptions& opt) {
  if (f.codomain_dim() == 1 && emb.carrier_dim() == 2) return find_collision_bisection(f, emb, tol, opt.bisection);
  return find_collision_multistart(f, emb, tol, opt.multistart);
}

/// Antipodal pair on an m-sphere of radius M: a fiber of diameter >= 2M,
/// up to the reported defect.
inline CollisionWitness large_fiber_witness(const MapEval& f, double radius, const WitnessOptions& opt = {}) {
  const std::size_t n = f.domain_dim(), m = f.codomain_dim();
  if (n <= m) throw ConfigError("large fiber witness needs n > m (got n = " + std::to_string(n) + ", m = " +
                                std::to_string(m) + ")");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("radius must be positive and finite");
  Point center = opt.center.value_or(Point::zeros(n));
  if (center.dim() != n) throw InputError("center dimension differs from the map domain");
  SphereEmbedding emb = [&] {
    if (opt.carrier) {
      if (opt.carrier->size() != m + 1) {
        throw ConfigError("carrier needs exactly m + 1 = " + std::to_string(m + 1) + " vectors");
      }
      return SphereEmbedding::from_vectors(center, radius, *opt.carrier);
    }
    return SphereEmbedding::coordinate(center, radius, m + 1);
  }();
  const double tol = opt.tol.value_or(default_tolerance(f, center));
  return search_sphere(f, emb, tol, opt);
}

/// Antipodal pair on the sphere of diameter 1 inscribed in [0,1]^n (carrier:
/// first m + 1 axes), so the witness separation is exactly 1.
inline CollisionWitness cube_inscribed_sphere_witness(const MapEval& f, const WitnessOptions& opt = {}) {
  const std::size_t n = f.domain_dim(), m = f.codomain_dim();
  if (n <= m) throw ConfigError("cube witness needs n > m");
  Point center(Vector::Constant(static_cast<Eigen::Index>(n), 0.5));
  auto emb = SphereEmbedding::coordinate(center, 0.5, m + 1);
  const double tol = opt.tol.value_or(default_tolerance(f, center));
  return search_sphere(f, emb, tol, opt);
}

}  // namespace fiberaudit::collision
