#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fiberaudit/error.hpp"
#include "fiberaudit/geometry.hpp"
#include "fiberaudit/maps.hpp"
#include "fiberaudit/optimize.hpp"
#include "fiberaudit/parallel.hpp"
#include "fiberaudit/sampling.hpp"

// Approximate fibers {x : |f(x) - y| <= delta}, their diameters, and the
// intermediate-value constructions that certify a fiber is NOT small.
namespace fiberaudit::fibers {

using geometry::Point;
using geometry::PolylinePath;
using maps::MapEval;
using sampling::Box;

/// Sampled delta-relaxed fiber. Every stored point re-evaluates within
/// delta of the level.
struct ApproxFiber {
  Point level;
  double delta;
  std::vector<Point> points;
  std::string map_id;
  std::size_t evaluations = 0;
};

struct SamplingOptions {
  std::uint64_t seed = sampling::kDefaultSeed;
  std::size_t workers = 0;  // 0 -> parallel::worker_count()
  std::string map_id = "custom";
};

namespace detail {

/// r(x) = f(x) - y over R^n.
class LevelProblem {
 public:
  LevelProblem(const MapEval& f, const Vector& level, double max_step) : f_(f), level_(level), max_step_(max_step) {}

  Vector residual(const Vector& x) const { return f_(x) - level_; }
  Matrix residual_jacobian(const Vector& x) const { return f_.jacobian(x); }
  Matrix tangent_basis(const Vector& x) const { return Matrix::Identity(x.size(), x.size()); }
  Vector retract(const Vector& x, const Vector& step) const { return x + step; }
  double max_step() const { return max_step_; }
  std::size_t residual_cost() const { return 1; }
  std::size_t jacobian_cost() const { return f_.jacobian_cost(); }

 private:
  const MapEval& f_;
  const Vector& level_;
  double max_step_;
};

}  // namespace detail

/// Draws n_samples quasi-random points in the box, refines each by up to
/// refine_steps Gauss-Newton iterations on |f(x) - y|^2 (smooth maps only)
/// and keeps those within delta. An empty result is a valid outcome.
inline ApproxFiber sample_approx_fiber(const MapEval& f, const Point& level, double delta, const Box& box,
                                       std::size_t n_samples, std::size_t refine_steps,
                                       const SamplingOptions& opt = {}) {
  if (level.dim() != f.codomain_dim()) throw InputError("level dimension differs from the map codomain");
  if (box.dim() != f.domain_dim()) throw InputError("box dimension differs from the map domain");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InputError("delta must be positive and finite");
  if (n_samples < 1) throw InputError("sample count must be positive");

  const sampling::Halton halton(f.domain_dim(), opt.seed);
  const double diag = (box.hi - box.lo).norm();
  const detail::LevelProblem problem(f, level.coords(), diag);
  optimize::DescentOptions dopt;
  dopt.tol = 0.5 * delta;
  dopt.use_derivatives = f.smooth();
  dopt.max_iterations = f.smooth() ? refine_steps : 0;
  dopt.budget = std::numeric_limits<std::size_t>::max() / 2;

  std::vector<std::optional<Vector>> kept(n_samples);
  std::vector<std::size_t> evals(n_samples, 0);
  parallel::for_each_index(
      n_samples,
      [&](std::size_t i) {
        const auto res = optimize::least_squares_descent(problem, box.map(halton.point(i)), dopt);
        evals[i] = res.evaluations + 1;
        if (!res.z.allFinite()) return;
        const double check = (f(res.z) - level.coords()).norm();
        if (check <= delta) kept[i] = res.z;
      },
      opt.workers == 0 ? parallel::worker_count() : opt.workers);

  ApproxFiber fiber{level, delta, {}, opt.map_id, 0};
  for (std::size_t i = 0; i < n_samples; ++i) {
    fiber.evaluations += evals[i];
    if (kept[i]) fiber.points.emplace_back(*kept[i]);
  }
  return fiber;
}

/// Sample diameter: a lower bound on the diameter of the relaxed fiber.
inline double diameter_lower_bound(const ApproxFiber& fiber) {
  if (fiber.points.size() < 2) throw InputError("diameter_lower_bound needs at least two points");
  return geometry::farthest_pair(fiber.points).distance;
}

struct NotSmall {
  Point first;
  Point second;
  double distance;
};
struct PossiblySmall {
  double diameter_bound;
};
/// Sampling can prove a fiber is not small, never that it is small.
using FiberClass = std::variant<NotSmall, PossiblySmall>;

inline FiberClass classify_small(const ApproxFiber& fiber, double threshold) {
  if (fiber.points.empty()) throw InputError("cannot classify an empty fiber sample");
  if (fiber.points.size() == 1) return PossiblySmall{0.0};
  const auto fp = geometry::farthest_pair(fiber.points);
  if (fp.distance >= threshold) return NotSmall{fp.first, fp.second, fp.distance};
  return PossiblySmall{fp.distance};
}

inline bool is_possibly_small(const FiberClass& c) { return std::holds_alternative<PossiblySmall>(c); }

struct LevelPoint {
  Point x;
  double arc_length;
  double residual;  // f(x) - level
  std::size_t evaluations;
};

/// Bisection in arc length for f(x) = level along the path. Requires a
/// strict sign change of f - level between the endpoints.
inline LevelPoint ivt_level_point(const MapEval& f, const PolylinePath& path, double level, double tol,
                                  std::size_t max_iterations = 200) {
  if (f.codomain_dim() != 1) throw InputError("ivt_level_point needs a scalar map");
  if (path.start().dim() != f.domain_dim()) throw InputError("path dimension differs from the map domain");
  if (!(tol >= 0.0)) throw InputError("tolerance must be nonnegative");
  std::size_t evals = 0;
  auto h = [&](double s) {
    ++evals;
    return f(path.at(s))[0] - level;
  };
  double lo = 0.0, hi = path.length();
  double h_lo = h(lo);
  const double h_hi = h(hi);
  if (!(h_lo * h_hi < 0.0)) {
    throw InputError("ivt_level_point: f - level has no sign change between the path endpoints");
  }
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (std::abs(hm) <= tol) return {Point(path.at(mid)), mid, hm, evals};
    if (!(mid > lo && mid < hi)) break;
    if ((hm > 0.0) == (h_lo > 0.0)) {
      lo = mid;
      h_lo = hm;
    } else {
      hi = mid;
    }
  }
  throw EvaluationError("ivt_level_point: tolerance not reached; the map may be discontinuous along the path");
}

inline constexpr double kClearanceSlack = 1e-9;

/// Two points of one (relaxed) fiber at distance >= M (up to 1e-9 relative).
struct LemmaWitness {
  Point x;
  Point anchor;  // the middle-valued input point whose fiber is shown not small
  double distance;
  double defect;  // |f(x) - f(anchor)|
  bool degenerate;  // two inputs already shared a value
  std::size_t evaluations;
};

/// Given three pairwise M-separated points, constructs x with f(x) = f(b')
/// and d(x, b') >= M, where b' is the middle-valued point: a detour path
/// from the lowest- to the highest-valued point around the ball B(b', M)
/// must cross the level f(b').
inline LemmaWitness lemma_witness(const MapEval& f, const Point& a, const Point& b, const Point& c, double M,
                                  double tol) {
  if (f.codomain_dim() != 1) throw InputError("lemma_witness needs a scalar map");
  if (!(M > 0.0) || !std::isfinite(M)) throw InputError("M must be positive and finite");
  const std::vector<Point> pts{a, b, c};
  for (const auto& p : pts) {
    if (p.dim() != f.domain_dim()) throw InputError("point dimension differs from the map domain");
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (geometry::distance(pts[i], pts[j]) < M) {
        throw InputError("lemma_witness: points " + std::to_string(i) + " and " + std::to_string(j) +
                         " are closer than M");
      }
    }
  }
  const double v[3] = {f(a.coords())[0], f(b.coords())[0], f(c.coords())[0]};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (std::abs(v[i] - v[j]) <= tol) {
        return {pts[i], pts[j], geometry::distance(pts[i], pts[j]), std::abs(v[i] - v[j]), true, 3};
      }
    }
  }
  std::size_t order[3] = {0, 1, 2};
  std::sort(order, order + 3, [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  const Point& lo = pts[order[0]];
  const Point& mid = pts[order[1]];
  const Point& hi = pts[order[2]];

  const auto path = geometry::detour_path(lo, hi, mid, M);
  const auto lp = ivt_level_point(f, path, v[order[1]], tol);
  const double d = geometry::distance(lp.x, mid);
  if (d < M * (1.0 - kClearanceSlack)) throw EvaluationError("lemma_witness: level point violates the clearance");
  return {lp.x, mid, d, std::abs(lp.residual), false, 3 + lp.evaluations};
}

// ---- Union of small fibers (m = 1) -------------------------------------------

struct Single {
  Point center;  // every candidate lies within M of it
  std::size_t index;
};
struct Anchored {
  Point a;
  Point b;
  std::size_t a_index;
  std::size_t b_index;
};
/// A candidate farther than M from both anchors: either the implementation
/// or the smallness of some candidate is wrong.
struct Violation {
  Point point;
  std::size_t index;
  std::size_t a_index;
  std::size_t b_index;
};
using UnionProbe = std::variant<Single, Anchored, Violation>;

/// Checks that points of small fibers of a scalar map cluster around at
/// most two anchors: the first pair (in input order) at distance >= M.
inline UnionProbe union_probe(const std::vector<Point>& candidates, double M) {
  if (candidates.empty()) throw InputError("union_probe needs at least one candidate");
  if (!(M > 0.0) || !std::isfinite(M)) throw InputError("M must be positive and finite");
  for (const auto& p : candidates) geometry::require_same_dim(p, candidates.front());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (geometry::distance(candidates[i], candidates[j]) < M) continue;
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (geometry::distance(candidates[k], candidates[i]) < M) continue;
        if (geometry::distance(candidates[k], candidates[j]) < M) continue;
        return Violation{candidates[k], k, i, j};
      }
      return Anchored{candidates[i], candidates[j], i, j};
    }
  }
  return Single{candidates.front(), 0};
}

struct CandidateCheck {
  std::vector<FiberClass> classes;  // per candidate
  std::optional<std::size_t> first_not_small;
};

/// Samples the fiber through each candidate and classifies it against M.
inline CandidateCheck verify_small_candidates(const MapEval& f, const std::vector<Point>& candidates, double M,
                                              double delta, const Box& box, std::size_t n_samples,
                                              std::size_t refine_steps, const SamplingOptions& opt = {}) {
  CandidateCheck check;
  SamplingOptions inner = opt;
  inner.workers = 1;
  check.classes.resize(candidates.size(), PossiblySmall{0.0});
  parallel::for_each_index(
      candidates.size(),
      [&](std::size_t i) {
        auto fiber = sample_approx_fiber(f, f.eval(candidates[i]), delta, box, n_samples, refine_steps, inner);
        fiber.points.push_back(candidates[i]);
        check.classes[i] = classify_small(fiber, M);
      },
      opt.workers == 0 ? parallel::worker_count() : opt.workers);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!is_possibly_small(check.classes[i])) {
      check.first_not_small = i;
      break;
    }
  }
  return check;
}

// ---- Boundedness -----------------------------------------------------------------

struct Contradiction {
  Point x;       // f(x) = f(b) up to defect, d(x, b) >= M
  Point below;   // sample with f < f(b) outside B(b, M)
  Point above;   // sample with f > f(b) outside B(b, M)
  double distance;
  double defect;
};

enum class Side { Below, Above, Both };

/// Only one side (or neither) of f(b) was found outside B(b, M): consistent
/// with f being bounded from below (no smaller values found), from above,
/// or both.
struct ConsistentWithBounded {
  Side bounded_side;
};

using BoundednessOutcome = std::variant<Contradiction, ConsistentWithBounded>;

struct BoundednessOptions {
  std::size_t grid_points = 4096;
  std::uint64_t seed = sampling::kDefaultSeed;
};

/// Searches the box outside the closed ball B(b, M) for values on both
/// sides of f(b). If both exist, the detour/IVT construction yields a point
/// of b's fiber at distance >= M, so b's fiber is not small.
inline BoundednessOutcome boundedness_witness(const MapEval& f, const Point& b, double M, const Box& box, double tol,
                                              const BoundednessOptions& opt = {}) {
  if (f.codomain_dim() != 1) throw InputError("boundedness_witness needs a scalar map");
  if (b.dim() != f.domain_dim() || box.dim() != f.domain_dim()) throw InputError("dimension mismatch");
  if (!(M > 0.0) || !std::isfinite(M)) throw InputError("M must be positive and finite");
  const double fb = f(b.coords())[0];
  const sampling::Halton halton(f.domain_dim(), opt.seed);
  std::optional<Vector> lo, hi;
  double lo_v = fb, hi_v = fb;
  for (std::size_t i = 0; i < opt.grid_points; ++i) {
    const Vector x = box.map(halton.point(i));
    if (geometry::distance(x, b.coords()) <= M) continue;
    const double v = f(x)[0];
    if (v < lo_v) {
      lo_v = v;
      lo = x;
    }
    if (v > hi_v) {
      hi_v = v;
      hi = x;
    }
  }
  if (!lo && !hi) return ConsistentWithBounded{Side::Both};
  if (!lo) return ConsistentWithBounded{Side::Below};
  if (!hi) return ConsistentWithBounded{Side::Above};
  const Point below(*lo), above(*hi);
  const auto path = geometry::detour_path(below, above, b, M);
  const auto lp = ivt_level_point(f, path, fb, tol);
  const double d = geometry::distance(lp.x, b);
  return Contradiction{lp.x, below, above, d, std::abs(lp.residual)};
}

}  // namespace fiberaudit::fibers
