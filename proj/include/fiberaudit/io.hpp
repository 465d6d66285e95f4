#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiberaudit/error.hpp"
#include "fiberaudit/geometry.hpp"
#include "fiberaudit/sampling.hpp"

// Point-set files: CSV (one point per row, plain decimals) and JSON arrays
// of arrays. Dimension comes from the first row; every row must match it.
namespace fiberaudit::io {

using geometry::Point;

/// %.17g: round-trips every finite double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& token, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + token + "'", where);
  }
  if (used != token.size()) throw ParseError("not a number: '" + token + "'", where);
  if (!std::isfinite(v)) throw ParseError("value must be finite", where);
  return v;
}

/// "1,2.5,-3e4" -> vector.
inline Vector parse_values(const std::string& text, const std::string& where = "values") {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(parse_number(trim(tok), where));
  if (vals.empty()) throw ParseError("expected at least one value", where);
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

/// "lo:hi,lo:hi,..." (a single range is broadcast to `dim` coordinates).
inline sampling::Box parse_box(const std::string& text, std::size_t dim) {
  std::vector<double> lo, hi;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ParseError("box range must look like lo:hi", "box");
    lo.push_back(parse_number(trim(tok.substr(0, colon)), "box"));
    hi.push_back(parse_number(trim(tok.substr(colon + 1)), "box"));
  }
  if (lo.size() == 1 && dim > 1) {
    lo.assign(dim, lo[0]);
    hi.assign(dim, hi[0]);
  }
  if (lo.size() != dim) {
    throw ParseError("box has " + std::to_string(lo.size()) + " ranges, expected " + std::to_string(dim), "box");
  }
  try {
    return sampling::Box(Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(dim)),
                         Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(dim)));
  } catch (const InputError& e) {
    throw ParseError(e.what(), "box");
  }
}

inline std::vector<Point> parse_points_csv(const std::string& text) {
  std::vector<Point> pts;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = "line " + std::to_string(lineno);
    Vector v = parse_values(t, where);
    if (dim == 0) dim = static_cast<std::size_t>(v.size());
    if (static_cast<std::size_t>(v.size()) != dim) {
      throw ParseError("row has " + std::to_string(v.size()) + " values, expected " + std::to_string(dim), where);
    }
    pts.emplace_back(std::move(v));
  }
  return pts;
}

inline std::string points_to_csv(const std::vector<Point>& pts) {
  std::string out;
  for (const auto& p : pts) {
    for (std::size_t i = 0; i < p.dim(); ++i) {
      if (i) out += ',';
      out += format_double(p[i]);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline nlohmann::json points_to_json(const std::vector<Point>& pts) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& p : pts) a.push_back(vector_to_json(p.coords()));
  return a;
}

inline std::vector<Point> points_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("point set must be a JSON array", "/");
  std::vector<Point> pts;
  std::size_t dim = 0;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string where = "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].empty()) throw ParseError("point must be a nonempty array", where);
    Vector v(static_cast<Eigen::Index>(j[r].size()));
    for (std::size_t c = 0; c < j[r].size(); ++c) {
      if (!j[r][c].is_number()) throw ParseError("coordinate must be a number", where + "/" + std::to_string(c));
      v[static_cast<Eigen::Index>(c)] = j[r][c].get<double>();
    }
    if (dim == 0) dim = static_cast<std::size_t>(v.size());
    if (static_cast<std::size_t>(v.size()) != dim) throw ParseError("inconsistent point dimension", where);
    if (!v.allFinite()) throw ParseError("coordinates must be finite", where);
    pts.emplace_back(std::move(v));
  }
  return pts;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Reads a point file, choosing JSON for a .json extension and CSV otherwise.
inline std::vector<Point> read_points(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") {
    try {
      return points_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(e.what(), path.string());
    }
  }
  return parse_points_csv(text);
}

/// Writes via a temporary file in the same directory and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw InputError("failed writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace fiberaudit::io
