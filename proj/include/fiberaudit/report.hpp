#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiberaudit/collision.hpp"
#include "fiberaudit/error.hpp"
#include "fiberaudit/fibers.hpp"
#include "fiberaudit/io.hpp"
#include "fiberaudit/urysohn.hpp"

// Structured reports. Serialization is deterministic: object keys sorted,
// floating values printed with 17 significant digits, two-space indent.
namespace fiberaudit::report {

using nlohmann::json;

namespace detail {

inline void write(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        write(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (v == 0.0) {
        out += "0";  // also folds -0
      } else if (std::isfinite(v)) {
        out += io::format_double(v);
      } else {
        out += v > 0 ? "\"inf\"" : (v < 0 ? "\"-inf\"" : "\"nan\"");
      }
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string to_string(const json& j) {
  std::string out;
  detail::write(j, out, 0);
  out += '\n';
  return out;
}

/// 64-bit FNV-1a, hex; identifies the inputs a report was computed from.
inline std::string digest(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return s;
}

inline json point_json(const geometry::Point& p) { return io::vector_to_json(p.coords()); }

inline json to_json(const collision::CollisionWitness& w) {
  return {{"x", point_json(w.x)},
          {"x_prime", point_json(w.x_prime)},
          {"separation", w.separation},
          {"defect", w.defect},
          {"converged", w.converged},
          {"evaluations", w.evaluations},
          {"iterations", w.iterations},
          {"start_index", w.start_index},
          {"direction", io::vector_to_json(w.direction)}};
}

inline json to_json(const fibers::ApproxFiber& f) {
  return {{"level", point_json(f.level)},
          {"delta", f.delta},
          {"map_id", f.map_id},
          {"count", f.points.size()},
          {"evaluations", f.evaluations},
          {"points", io::points_to_json(f.points)}};
}

inline json to_json(const fibers::FiberClass& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, fibers::NotSmall>) {
          return {{"verdict", "not_small"}, {"first", point_json(v.first)}, {"second", point_json(v.second)},
                  {"distance", v.distance}};
        } else {
          return {{"verdict", "possibly_small"}, {"diameter_bound", v.diameter_bound}};
        }
      },
      c);
}

inline json to_json(const fibers::LemmaWitness& w) {
  return {{"x", point_json(w.x)},           {"anchor", point_json(w.anchor)}, {"distance", w.distance},
          {"defect", w.defect},             {"degenerate", w.degenerate},     {"evaluations", w.evaluations}};
}

inline json to_json(const fibers::UnionProbe& p) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, fibers::Single>) {
          return {{"outcome", "single"}, {"center", point_json(v.center)}, {"index", v.index}};
        } else if constexpr (std::is_same_v<T, fibers::Anchored>) {
          return {{"outcome", "anchored"}, {"a", point_json(v.a)}, {"b", point_json(v.b)},
                  {"a_index", v.a_index},  {"b_index", v.b_index}};
        } else {
          return {{"outcome", "violation"}, {"point", point_json(v.point)}, {"index", v.index},
                  {"a_index", v.a_index},   {"b_index", v.b_index}};
        }
      },
      p);
}

inline std::string side_name(fibers::Side s) {
  switch (s) {
    case fibers::Side::Below: return "below";
    case fibers::Side::Above: return "above";
    case fibers::Side::Both: return "both";
  }
  return "both";
}

inline json to_json(const fibers::BoundednessOutcome& o) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, fibers::Contradiction>) {
          return {{"outcome", "contradiction"}, {"x", point_json(v.x)},   {"below", point_json(v.below)},
                  {"above", point_json(v.above)}, {"distance", v.distance}, {"defect", v.defect}};
        } else {
          return {{"outcome", "consistent_with_bounded"}, {"bounded_side", side_name(v.bounded_side)}};
        }
      },
      o);
}

inline json to_json(const urysohn::ApolloniusFiber& f) {
  if (f.is_sphere()) {
    return {{"level", f.level}, {"kind", "sphere"}, {"center", point_json(f.sphere().center)},
            {"radius", f.sphere().radius}};
  }
  return {{"level", f.level}, {"kind", "hyperplane"}, {"point", point_json(f.hyperplane().point)},
          {"normal", io::vector_to_json(f.hyperplane().normal)}};
}

// ---- Figure data -------------------------------------------------------------------

inline constexpr std::size_t kCirclePoints = 256;

struct PointSet {
  std::string name;  // file stem, indexed by level
  std::vector<geometry::Point> points;
};

inline std::string level_name(std::size_t index, double level) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "level_%03zu_t%.6f", index, level);
  return buf;
}

/// Levels i / (k + 1), i = 1..k, drawn in the plane through a and b.
inline std::vector<PointSet> urysohn_figure(const geometry::Point& a, const geometry::Point& b, std::size_t k,
                                            const urysohn::PlotWindow& window) {
  std::vector<PointSet> sets;
  for (std::size_t i = 1; i <= k; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(k + 1);
    sets.push_back({level_name(i - 1, t), urysohn::fiber_polyline(a, b, t, kCirclePoints, window)});
  }
  return sets;
}

/// Fibers of the axis tube map in R^3 over levels (x1, r): circles of radius
/// r in the plane x_1 = const.
inline std::vector<PointSet> axis_tube_figure(const std::vector<double>& x1_values, double r) {
  std::vector<PointSet> sets;
  for (std::size_t i = 0; i < x1_values.size(); ++i) {
    std::vector<geometry::Point> pts;
    for (std::size_t j = 0; j < kCirclePoints; ++j) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(kCirclePoints);
      pts.push_back(geometry::Point{x1_values[i], r * std::cos(phi), r * std::sin(phi)});
    }
    sets.push_back({level_name(i, x1_values[i]), std::move(pts)});
  }
  return sets;
}

/// Point sets to plot from a saved report (urysohn or fiber subcommand).
inline std::vector<PointSet> emit_figure_data(const json& rep) {
  const std::string kind = rep.value("subcommand", std::string());
  const json& result = rep.at("result");
  if (kind == "fiber") {
    return {{level_name(0, 0.0), io::points_from_json(result.at("points"))}};
  }
  if (kind == "urysohn") {
    const geometry::Point a(io::points_from_json(json::array({rep.at("config").at("a")})).front());
    const geometry::Point b(io::points_from_json(json::array({rep.at("config").at("b")})).front());
    const double d = geometry::distance(a, b);
    const urysohn::PlotWindow window{-2.0 * d, 3.0 * d, -2.5 * d, 2.5 * d};
    std::vector<PointSet> sets;
    std::size_t idx = 0;
    for (const auto& f : result.at("fibers")) {
      const double t = f.at("level").get<double>();
      sets.push_back({level_name(idx++, t), urysohn::fiber_polyline(a, b, t, kCirclePoints, window)});
    }
    return sets;
  }
  throw InputError("figure data is available for 'urysohn' and 'fiber' reports, not '" + kind + "'");
}

}  // namespace fiberaudit::report
