// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiberaudit/fiberaudit.hpp"

using namespace fiberaudit;
using geometry::Point;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string summary;
  json report;     // deterministic part, compared across reruns
  double seconds = 0.0;
};

// Independent oracle for d(x,a)^2 / (d(x,a)^2 + d(x,b)^2) in the plane.
double urysohn_oracle(double ax, double ay, double bx, double by, double x, double y) {
  const double p = (x - ax) * (x - ax) + (y - ay) * (y - ay);
  const double q = (x - bx) * (x - bx) + (y - by) * (y - by);
  return p / (p + q);
}

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome c1_linear_large_radius() {
  const auto t0 = Clock::now();
  Matrix a(2, 3);
  a << 1, 0, 0, 0, 1, 0;
  const auto f = maps::MapEval::from(maps::MapDescriptor::linear(a));
  const double M = 1e6;
  const auto w = collision::large_fiber_witness(f, M);
  const double secs = seconds_since(t0);
  const double defect = (f(w.x.coords()) - f(w.x_prime.coords())).norm();
  const double sep = geometry::distance(w.x, w.x_prime);
  const bool pass = std::abs(sep - 2 * M) <= 1e-9 * M && defect <= 1e-9 && secs < 1.0;
  return {pass, "separation " + io::format_double(sep) + ", defect " + fmt("%.3g", defect),
          report::to_json(w), secs};
}

Outcome c2_urysohn_bisection() {
  const auto t0 = Clock::now();
  const auto f = maps::MapEval::from(maps::MapDescriptor::urysohn(Point{0.0, 0.0}, Point{4.0, 0.0}));
  collision::WitnessOptions opt;
  opt.tol = 1e-12;
  opt.bisection.max_iterations = 80;
  const auto w = collision::large_fiber_witness(f, 100.0, opt);
  const double secs = seconds_since(t0);
  const double d = std::abs(urysohn_oracle(0, 0, 4, 0, w.x[0], w.x[1]) - urysohn_oracle(0, 0, 4, 0, w.x_prime[0], w.x_prime[1]));
  const bool on_circle = std::abs(std::hypot(w.x[0], w.x[1]) - 100.0) <= 1e-9 * 100.0;
  const bool pass = w.converged && d <= 1e-12 && w.iterations <= 80 && on_circle;
  return {pass, "defect " + fmt("%.3g", d) + " after " + std::to_string(w.iterations) + " bisection steps",
          report::to_json(w), secs};
}

Outcome c3_apollonius_sampling() {
  const auto t0 = Clock::now();
  const auto f = maps::MapEval::from(maps::MapDescriptor::urysohn(Point{0.0, 0.0}, Point{4.0, 0.0}));
  const sampling::Box box(Vector{{-2.0, -6.0}}, Vector{{12.0, 6.0}});
  // A few starts sit where the level is unreachable by local descent, so
  // draw slightly more than needed and keep the first 500 refined points.
  auto fiber = fibers::sample_approx_fiber(f, Point{0.8}, 1e-9, box, 520, 100);
  if (fiber.points.size() > 500) fiber.points.resize(500, fiber.points.front());
  const double secs = seconds_since(t0);
  const double cx = 16.0 / 3.0, r = 8.0 / 3.0;
  double worst = 0.0;
  for (const auto& p : fiber.points) worst = std::max(worst, std::abs(std::hypot(p[0] - cx, p[1]) - r));
  const double diam = fiber.points.size() >= 2 ? fibers::diameter_lower_bound(fiber) : 0.0;
  const bool pass = fiber.points.size() == 500 && worst <= 1e-6 && std::abs(diam - 16.0 / 3.0) <= 1e-3;
  json rep = {{"count", fiber.points.size()}, {"max_circle_deviation", worst}, {"diameter_lower_bound", diam},
              {"points_digest", report::digest(io::points_to_csv(fiber.points))}};
  return {pass,
          std::to_string(fiber.points.size()) + " samples, max deviation " + fmt("%.3g", worst) +
              ", diameter bound " + io::format_double(diam),
          rep, secs};
}

Outcome c4_exact_codec_values() {
  using quantizer::Rational;
  const auto cfg = quantizer::CodecConfig::quadrant(1.0);
  struct Case {
    double x, y;
    Rational expected;
  };
  const Case cases[] = {{0.5, 0.5, Rational(1)}, {1.2, -0.7, Rational(1, 143)}, {-0.3, 2.9, Rational(1, 245)}};
  bool pass = true;
  json rep = json::array();
  for (const auto& c : cases) {
    const auto v = quantizer::code_to_rational(quantizer::encode(cfg, Point{c.x, c.y}));
    pass = pass && v.size() == 1 && v[0] == c.expected;
    rep.push_back(v.empty() ? std::string("?") : v[0].str());
  }
  const double diam = quantizer::fiber_diameter(cfg);
  pass = pass && diam == std::sqrt(2.0);
  rep.push_back(diam);
  return {pass, "f values " + rep[0].get<std::string>() + ", " + rep[1].get<std::string>() + ", " +
                    rep[2].get<std::string>() + "; fiber diameter " + io::format_double(diam),
          rep, 0.0};
}

Outcome c5_codec_round_trip() {
  const auto t0 = Clock::now();
  const double eps = 0.25;
  bool pass = true;
  json rep = json::object();
  std::size_t collisions = 0, pairs_checked = 0;
  double worst_ratio = 0.0;
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto cfg = quantizer::CodecConfig::general(n, std::max<std::size_t>(1, n / 2), eps);
    std::mt19937_64 rng(sampling::derive_seed(sampling::kDefaultSeed, n));
    std::uniform_real_distribution<double> coord(-100.0, 100.0);
    std::uniform_int_distribution<int> shift(-1, 1);
    auto random_point = [&] {
      Vector v(static_cast<Eigen::Index>(n));
      for (auto& c : v) c = coord(rng);
      return Point(v);
    };
    const double bound = 0.5 * eps * std::sqrt(static_cast<double>(n));
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Point x = random_point();
      const double err = geometry::distance(x, quantizer::decode(cfg, quantizer::encode(cfg, x)));
      worst = std::max(worst, err);
    }
    worst_ratio = std::max(worst_ratio, worst / bound);
    pass = pass && worst <= bound;
    // Distinct cells must give distinct codes: half the pairs are far apart,
    // half are neighbouring cells.
    std::size_t local_pairs = 0;
    while (local_pairs < 100000) {
      const Point x = random_point();
      Vector yv = x.coords();
      if (local_pairs % 2 == 0) {
        yv = random_point().coords();
      } else {
        for (auto& c : yv) c += eps * shift(rng);
      }
      const Point y(yv);
      const auto cx = quantizer::cell_of(cfg, x), cy = quantizer::cell_of(cfg, y);
      if (cx == cy) continue;
      ++local_pairs;
      if (quantizer::encode(cfg, x).slots == quantizer::encode(cfg, y).slots) ++collisions;
    }
    pairs_checked += local_pairs;
    rep[std::to_string(n)] = worst;
  }
  pass = pass && collisions == 0;
  rep["collisions"] = collisions;
  return {pass,
          "worst error / bound " + fmt("%.6f", worst_ratio) + ", " + std::to_string(collisions) + " collisions in " +
              std::to_string(pairs_checked) + " distinct-cell pairs",
          rep, seconds_since(t0)};
}

Outcome c6_l1_norm() {
  const auto cfg = quantizer::CodecConfig::quadrant(1.0);
  const int cutoff = 60;
  double sum = 0.0, sup = 0.0;
  for (int i = -cutoff; i < cutoff; ++i) {
    for (int j = -cutoff; j < cutoff; ++j) {
      const double v = quantizer::code_value(quantizer::encode(cfg, Point{i + 0.5, j + 0.5}))[0];
      sum += v;  // each cell has area 1
      sup = std::max(sup, v);
    }
  }
  const double target = 4877.0 / 1440.0;
  const bool exact = quantizer::l1_norm_closed_form(cfg) == quantizer::Rational(4877, 1440) &&
                     quantizer::linf_norm(cfg) == quantizer::Rational(1);
  const bool pass = std::abs(sum - target) <= 1e-12 && sup == 1.0 && exact;
  return {pass, "truncated L1 " + io::format_double(sum) + " (|diff| " + fmt("%.3g", std::abs(sum - target)) +
                    "), Linf " + io::format_double(sup),
          json{{"l1", sum}, {"linf", sup}}, 0.0};
}

Outcome c7_lemma_witness() {
  const auto t0 = Clock::now();
  const auto f = maps::MapEval::from(maps::MapDescriptor::urysohn(Point{0.0, 0.0}, Point{4.0, 0.0}));
  const Point p0{0.5, 0.0}, p1{1.5, 0.2}, p2{1.0, 1.1};
  const auto w = fibers::lemma_witness(f, p0, p1, p2, 1.0, 1e-10);
  const double secs = seconds_since(t0);
  const double fx = urysohn_oracle(0, 0, 4, 0, w.x[0], w.x[1]);
  const double fb = urysohn_oracle(0, 0, 4, 0, w.anchor[0], w.anchor[1]);
  const double d = std::hypot(w.x[0] - w.anchor[0], w.x[1] - w.anchor[1]);
  const bool distinct = f(p0.coords())[0] != f(p1.coords())[0] && f(p1.coords())[0] != f(p2.coords())[0] &&
                        f(p0.coords())[0] != f(p2.coords())[0];
  const bool pass = distinct && !w.degenerate && std::abs(fx - fb) <= 1e-9 && d >= 1.0 - 1e-9 && secs < 1.0;
  return {pass, "|f(x) - f(b)| " + fmt("%.3g", std::abs(fx - fb)) + ", d(x, b) " + io::format_double(d),
          report::to_json(w), secs};
}

Outcome c8_union_probe() {
  const auto t0 = Clock::now();
  const Point a{0.0, 0.0}, b{4.0, 0.0};
  const double M = geometry::distance(a, b) / 4.0;
  const auto f = maps::MapEval::from(maps::MapDescriptor::urysohn(a, b));
  const auto levels = urysohn::small_levels(a, b, M);
  const sampling::Box box(Vector{{-3.0, -3.0}}, Vector{{7.0, 3.0}});
  std::size_t anchored = 0, rejected = 0;
  json rep = json::object();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(sampling::derive_seed(sampling::kDefaultSeed, 1000 + seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> cands;
    for (int i = 0; i < 200; ++i) {
      const double s = unit(rng) * levels.lower_end;
      const double t = i % 2 == 0 ? s : 1.0 - s;
      const auto g = urysohn::fiber_geometry(a, b, t);
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const auto& sp = g.sphere();
      cands.push_back(Point{sp.center[0] + sp.radius * std::cos(phi), sp.center[1] + sp.radius * std::sin(phi)});
    }
    fibers::SamplingOptions sopt;
    sopt.seed = sampling::derive_seed(sampling::kDefaultSeed, seed);
    const auto check = fibers::verify_small_candidates(f, cands, M, 1e-9, box, 16, 50, sopt);
    if (check.first_not_small) {
      ++rejected;
      continue;
    }
    if (std::holds_alternative<fibers::Anchored>(fibers::union_probe(cands, M))) ++anchored;
  }
  rep["urysohn_anchored"] = anchored;
  rep["urysohn_rejected"] = rejected;

  // Axis tube in R^3: candidates far out along the axis, tube radii on both
  // sides of M/2; those whose sampled fiber stays below M must be thin.
  const auto tube = maps::MapEval::from(maps::MapDescriptor::axis_tube(3, 2));
  std::mt19937_64 rng(sampling::derive_seed(sampling::kDefaultSeed, 77));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t accepted = 0, outside = 0;
  double worst_radius = 0.0;
  for (double x1 : {1e6, -1e6}) {
    std::vector<Point> cands;
    for (int i = 0; i < 50; ++i) {
      const double r = unit(rng) * M;
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      cands.push_back(Point{x1, r * std::cos(phi), r * std::sin(phi)});
    }
    const sampling::Box tbox(Vector{{x1 - 2.0, -2.0, -2.0}}, Vector{{x1 + 2.0, 2.0, 2.0}});
    const auto check = fibers::verify_small_candidates(tube, cands, M, 1e-9, tbox, 512, 50);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (!fibers::is_possibly_small(check.classes[i])) continue;
      ++accepted;
      const double r = maps::axis_distance(cands[i].coords());
      worst_radius = std::max(worst_radius, r);
      if (r >= M / 2.0) ++outside;
    }
  }
  rep["tube_accepted"] = accepted;
  rep["tube_max_radius"] = worst_radius;
  const bool pass = anchored == 100 && rejected == 0 && accepted > 0 && outside == 0;
  return {pass,
          "urysohn anchored in " + std::to_string(anchored) + "/100 seeds; axis tube: " + std::to_string(accepted) +
              " accepted, max axis distance " + fmt("%.4f", worst_radius) + " (M/2 = " + fmt("%.2f", M / 2.0) + ")",
          rep, seconds_since(t0)};
}

maps::MapEval perturbed_projection(std::uint64_t seed) {
  std::mt19937_64 rng(sampling::derive_seed(sampling::kDefaultSeed, 5000 + seed));
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix p(2, 3), w(2, 3);
  Vector c(2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      p(i, j) = g(rng);
      w(i, j) = 3.0 * g(rng);
    }
    c[i] = g(rng);
  }
  auto fn = [p, w, c](const Vector& x) -> Vector {
    return p * x + 0.1 * (w * x + c).array().sin().matrix();
  };
  auto jac = [p, w, c](const Vector& x) -> Matrix {
    const Vector cosv = (w * x + c).array().cos().matrix();
    return p + 0.1 * cosv.asDiagonal() * w;
  };
  return maps::MapEval(3, 2, fn, jac, true, "perturbed_projection");
}

Outcome c9_cube_witness() {
  const auto t0 = Clock::now();
  std::size_t ok = 0;
  double slowest = 0.0;
  json rep = json::array();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = perturbed_projection(s);
    collision::WitnessOptions opt;
    opt.tol = 1e-7;
    opt.multistart.starts = 100;
    opt.multistart.seed = sampling::derive_seed(sampling::kDefaultSeed, s);
    const auto t1 = Clock::now();
    const auto w = collision::cube_inscribed_sphere_witness(f, opt);
    const double secs = seconds_since(t1);
    slowest = std::max(slowest, secs);
    const double defect = (f(w.x.coords()) - f(w.x_prime.coords())).norm();
    const double sep = geometry::distance(w.x, w.x_prime);
    const bool inside = (w.x.coords().array() >= 0.0).all() && (w.x.coords().array() <= 1.0).all() &&
                        (w.x_prime.coords().array() >= 0.0).all() && (w.x_prime.coords().array() <= 1.0).all();
    if (defect <= 1e-6 && std::abs(sep - 1.0) <= 1e-9 && inside && secs < 10.0) ++ok;
    rep.push_back({{"defect", defect}, {"separation", sep}});
  }
  const double rate = static_cast<double>(ok) / 20.0;
  return {rate >= 0.95,
          "converged " + std::to_string(ok) + "/20 (rate " + fmt("%.2f", rate) + "), slowest run " +
              fmt("%.3f", slowest) + " s",
          rep, seconds_since(t0)};
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"C1", "linear projection, M = 1e6", c1_linear_large_radius},
      {"C2", "urysohn circle bisection", c2_urysohn_bisection},
      {"C3", "apollonius fiber sampling", c3_apollonius_sampling},
      {"C4", "exact codec values", c4_exact_codec_values},
      {"C5", "codec round trip", c5_codec_round_trip},
      {"C6", "L1 / Linf norms", c6_l1_norm},
      {"C7", "lemma witness", c7_lemma_witness},
      {"C8", "union probe", c8_union_probe},
      {"C9", "cube witness convergence", c9_cube_witness},
  };

  bool all = true;
  std::vector<std::string> first_reports;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    first_reports.push_back(report::to_string(o.report));
    std::printf("[%s] %s %s: %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.summary.c_str(), o.seconds);
    std::fflush(stdout);
  }

  // Rerun with a single worker thread: reports must match byte for byte.
  ::setenv("FIBERAUDIT_THREADS", "1", 1);
  std::size_t mismatched = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string again;
    try {
      again = report::to_string(criteria[i].run().report);
    } catch (const std::exception& e) {
      again = e.what();
    }
    if (again != first_reports[i]) ++mismatched;
  }
  const bool det = mismatched == 0;
  all = all && det;
  std::printf("[%s] C10 determinism: %zu of %zu reports differ on rerun with FIBERAUDIT_THREADS=1\n",
              det ? "PASS" : "FAIL", mismatched, criteria.size());
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
