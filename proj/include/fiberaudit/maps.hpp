#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiberaudit/error.hpp"
#include "fiberaudit/geometry.hpp"
#include "fiberaudit/quantizer.hpp"

namespace fiberaudit::maps {

using geometry::Point;

// ---- Closed-form catalog maps -----------------------------------------------

/// d(x,a)^2 / (d(x,a)^2 + d(x,b)^2): 0 at a, 1 at b, 1/2 on the bisector.
inline double urysohn_value(const Vector& a, const Vector& b, const Vector& x) {
  double p = 0.0, q = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double da = x[i] - a[i];
    const double db = x[i] - b[i];
    p += da * da;
    q += db * db;
  }
  const double denom = p + q;
  if (!(denom > 0.0)) throw ConfigError("urysohn map requires a != b");
  return p / denom;
}

inline double urysohn_value(const Point& a, const Point& b, const Point& x) {
  geometry::require_same_dim(a, b);
  geometry::require_same_dim(a, x);
  if (a == b) throw ConfigError("urysohn map requires a != b");
  return urysohn_value(a.coords(), b.coords(), x.coords());
}

/// Gradient of urysohn_value: (q grad p - p grad q) / (p + q)^2.
inline Vector urysohn_gradient(const Vector& a, const Vector& b, const Vector& x) {
  const Vector xa = x - a;
  const Vector xb = x - b;
  const double p = xa.squaredNorm();
  const double q = xb.squaredNorm();
  const double s = p + q;
  return (2.0 * q * xa - 2.0 * p * xb) / (s * s);
}

/// (x_1, |(x_2..x_n)|, 0, ..., 0) in R^m. Fibers are (n-2)-spheres around the x_1 axis.
inline Vector axis_tube_value(const Vector& x, std::size_t m) {
  if (x.size() < 2) throw ConfigError("axis tube map requires n >= 2");
  if (m < 2) throw ConfigError("axis tube map requires m >= 2");
  Vector y = Vector::Zero(static_cast<Eigen::Index>(m));
  y[0] = x[0];
  double s = 0.0;
  for (Eigen::Index i = 1; i < x.size(); ++i) s += x[i] * x[i];
  y[1] = std::sqrt(s);
  return y;
}

inline Point axis_tube_value(const Point& x, std::size_t m) { return Point(axis_tube_value(x.coords(), m)); }

/// Distance from x to the x_1 axis, i.e. the tube radius of x's fiber.
inline double axis_distance(const Vector& x) { return x.tail(x.size() - 1).norm(); }

// ---- Descriptor ---------------------------------------------------------------

class MapDescriptor;

namespace detail {
inline bool same(const Matrix& x, const Matrix& y) {
  return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
}
}  // namespace detail

struct Linear {
  Matrix matrix;  // m x n
};
struct Urysohn {
  Point a;
  Point b;
};
struct AxisTube {
  std::size_t n;
  std::size_t m;
};
struct PrimeQuantizer {
  quantizer::CodecConfig config;
};
/// outer(inner(x)) = matrix * inner(x) + offset.
struct Composite {
  Matrix matrix;
  Vector offset;
  std::shared_ptr<const MapDescriptor> inner;
};

/// Declarative, immutable definition of a map R^n -> R^m.
class MapDescriptor {
 public:
  using Variant = std::variant<Linear, Urysohn, AxisTube, PrimeQuantizer, Composite>;

  static MapDescriptor linear(Matrix matrix) {
    if (matrix.rows() < 1 || matrix.cols() < 1) throw ConfigError("linear map needs a nonempty matrix");
    if (!matrix.allFinite()) throw ConfigError("linear map matrix must be finite");
    const auto n = static_cast<std::size_t>(matrix.cols());
    const auto m = static_cast<std::size_t>(matrix.rows());
    return MapDescriptor(Linear{std::move(matrix)}, n, m, true);
  }

  static MapDescriptor urysohn(Point a, Point b) {
    geometry::require_same_dim(a, b);
    if (a == b) throw ConfigError("urysohn map requires a != b");
    const std::size_t n = a.dim();
    return MapDescriptor(Urysohn{std::move(a), std::move(b)}, n, 1, true);
  }

  static MapDescriptor axis_tube(std::size_t n, std::size_t m) {
    if (n < 2 || m < 2) throw ConfigError("axis tube map requires n >= 2 and m >= 2");
    return MapDescriptor(AxisTube{n, m}, n, m, true);
  }

  static MapDescriptor prime_quantizer(quantizer::CodecConfig config) {
    const std::size_t n = config.n(), m = config.m();
    return MapDescriptor(PrimeQuantizer{std::move(config)}, n, m, false);
  }

  static MapDescriptor composite(Matrix matrix, Vector offset, MapDescriptor inner) {
    if (static_cast<std::size_t>(matrix.cols()) != inner.m()) {
      throw ConfigError("composite outer matrix has " + std::to_string(matrix.cols()) +
                        " columns but inner map has codomain dimension " + std::to_string(inner.m()));
    }
    if (matrix.rows() < 1) throw ConfigError("composite outer matrix needs at least one row");
    if (offset.size() != matrix.rows()) throw ConfigError("composite offset length must equal outer matrix rows");
    if (!matrix.allFinite() || !offset.allFinite()) throw ConfigError("composite outer map must be finite");
    const std::size_t n = inner.n();
    const auto m = static_cast<std::size_t>(matrix.rows());
    const bool cont = inner.continuous();
    return MapDescriptor(
        Composite{std::move(matrix), std::move(offset), std::make_shared<const MapDescriptor>(std::move(inner))}, n,
        m, cont);
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  /// False exactly for maps built on the prime quantizer.
  bool continuous() const { return continuous_; }
  const Variant& variant() const { return variant_; }

  std::string kind() const {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Linear>) return "linear";
          if constexpr (std::is_same_v<T, Urysohn>) return "urysohn";
          if constexpr (std::is_same_v<T, AxisTube>) return "axis_tube";
          if constexpr (std::is_same_v<T, PrimeQuantizer>) return "prime_quantizer";
          if constexpr (std::is_same_v<T, Composite>) return "composite";
        },
        variant_);
  }

  friend bool operator==(const MapDescriptor& x, const MapDescriptor& y) {
    if (x.n_ != y.n_ || x.m_ != y.m_ || x.continuous_ != y.continuous_) return false;
    if (x.variant_.index() != y.variant_.index()) return false;
    return std::visit(
        [&](const auto& lhs) -> bool {
          using T = std::decay_t<decltype(lhs)>;
          const auto& rhs = std::get<T>(y.variant_);
          if constexpr (std::is_same_v<T, Linear>) return detail::same(lhs.matrix, rhs.matrix);
          if constexpr (std::is_same_v<T, Urysohn>) return lhs.a == rhs.a && lhs.b == rhs.b;
          if constexpr (std::is_same_v<T, AxisTube>) return lhs.n == rhs.n && lhs.m == rhs.m;
          if constexpr (std::is_same_v<T, PrimeQuantizer>) return lhs.config == rhs.config;
          if constexpr (std::is_same_v<T, Composite>) {
            return detail::same(lhs.matrix, rhs.matrix) && detail::same(lhs.offset, rhs.offset) && *lhs.inner == *rhs.inner;
          }
        },
        x.variant_);
  }

 private:
  MapDescriptor(Variant v, std::size_t n, std::size_t m, bool continuous)
      : variant_(std::move(v)), n_(n), m_(m), continuous_(continuous) {}

  Variant variant_;
  std::size_t n_;
  std::size_t m_;
  bool continuous_;
};

/// f(x) for a validated descriptor; x must have dimension n.
inline Vector evaluate(const MapDescriptor& map, const Vector& x) {
  return std::visit(
      [&](const auto& v) -> Vector {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return v.matrix * x;
        } else if constexpr (std::is_same_v<T, Urysohn>) {
          return Vector::Constant(1, urysohn_value(v.a.coords(), v.b.coords(), x));
        } else if constexpr (std::is_same_v<T, AxisTube>) {
          return axis_tube_value(x, v.m);
        } else if constexpr (std::is_same_v<T, PrimeQuantizer>) {
          return quantizer::code_value(quantizer::encode(v.config, Point(x)));
        } else {
          return v.matrix * evaluate(*v.inner, x) + v.offset;
        }
      },
      map.variant());
}

/// Checked evaluation: dimension mismatch and non-finite input are InputErrors.
inline Point eval(const MapDescriptor& map, const Point& x) {
  if (x.dim() != map.n()) {
    throw InputError("map expects dimension " + std::to_string(map.n()) + ", got " + std::to_string(x.dim()));
  }
  return Point(evaluate(map, x.coords()));
}

/// Central differences with step 1e-6 (1 + |x|).
template <typename F>
Matrix finite_difference_jacobian(const F& f, const Vector& x, std::size_t m) {
  const double h = 1e-6 * (1.0 + x.norm());
  Matrix jac(static_cast<Eigen::Index>(m), x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const Vector fp = f(xp);
    xp[i] = x[i] - h;
    const Vector fm = f(xp);
    xp[i] = x[i];
    jac.col(i) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

/// Analytic Jacobian where the catalog provides one (Linear, Urysohn and
/// affine compositions of them); empty matrix otherwise.
inline Matrix analytic_jacobian(const MapDescriptor& map, const Vector& x) {
  return std::visit(
      [&](const auto& v) -> Matrix {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return v.matrix;
        } else if constexpr (std::is_same_v<T, Urysohn>) {
          return urysohn_gradient(v.a.coords(), v.b.coords(), x).transpose();
        } else if constexpr (std::is_same_v<T, Composite>) {
          const Matrix inner = analytic_jacobian(*v.inner, x);
          if (inner.size() == 0) return Matrix();
          return v.matrix * inner;
        } else {
          return Matrix();
        }
      },
      map.variant());
}

inline bool has_analytic_jacobian(const MapDescriptor& map) {
  return std::visit(
      [](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Linear> || std::is_same_v<T, Urysohn>) return true;
        if constexpr (std::is_same_v<T, Composite>) return has_analytic_jacobian(*v.inner);
        return false;
      },
      map.variant());
}

/// Type-erased evaluation contract used by the search algorithms. Wraps
/// either a catalog descriptor or an arbitrary callable.
class MapEval {
 public:
  using Function = std::function<Vector(const Vector&)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;

  /// `smooth` enables derivative-based search; without an analytic
  /// Jacobian, central finite differences are used.
  MapEval(std::size_t n, std::size_t m, Function f, JacobianFn jacobian = {}, bool smooth = true,
          std::string name = "custom")
      : n_(n), m_(m), f_(std::move(f)), jac_(std::move(jacobian)), smooth_(smooth), name_(std::move(name)) {
    if (n_ < 1 || m_ < 1) throw ConfigError("map dimensions must be positive");
    if (!f_) throw ConfigError("map function is empty");
  }

  static MapEval from(const MapDescriptor& desc) {
    auto shared = std::make_shared<const MapDescriptor>(desc);
    JacobianFn jac;
    if (maps::has_analytic_jacobian(desc)) {
      jac = [shared](const Vector& x) { return analytic_jacobian(*shared, x); };
    }
    return MapEval(
        desc.n(), desc.m(), [shared](const Vector& x) { return evaluate(*shared, x); }, std::move(jac),
        desc.continuous(), desc.kind());
  }

  std::size_t domain_dim() const { return n_; }
  std::size_t codomain_dim() const { return m_; }
  bool smooth() const { return smooth_; }
  bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }
  const std::string& name() const { return name_; }

  /// Map evaluations one Jacobian costs (1 when analytic).
  std::size_t jacobian_cost() const { return jac_ ? 1 : 2 * n_; }

  /// Unchecked-input evaluation; throws EvaluationError on non-finite output.
  Vector operator()(const Vector& x) const {
    Vector y = f_(x);
    if (static_cast<std::size_t>(y.size()) != m_) throw EvaluationError("map returned wrong output dimension");
    if (!y.allFinite()) throw EvaluationError("map returned a non-finite value");
    return y;
  }

  Point eval(const Point& x) const {
    if (x.dim() != n_) {
      throw InputError("map expects dimension " + std::to_string(n_) + ", got " + std::to_string(x.dim()));
    }
    return Point((*this)(x.coords()));
  }

  Matrix jacobian(const Vector& x) const {
    if (jac_) return jac_(x);
    return finite_difference_jacobian(*this, x, m_);
  }

 private:
  std::size_t n_;
  std::size_t m_;
  Function f_;
  JacobianFn jac_;
  bool smooth_;
  std::string name_;
};

// ---- JSON descriptor format ------------------------------------------------------

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline Vector vector_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a nonempty array of numbers", where);
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("expected a number", where + "/" + std::to_string(i));
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  if (!v.allFinite()) throw ParseError("values must be finite", where);
  return v;
}

/// Row-major matrix: nested rows, or a flat array of rows*cols entries.
inline Matrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a nonempty array", where);
  Matrix mat(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (j[0].is_array()) {
    if (j.size() != rows) {
      throw ParseError("matrix has " + std::to_string(j.size()) + " rows, expected m = " + std::to_string(rows), where);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string rw = where + "/" + std::to_string(r);
      const Vector row = vector_from_json(j[r], rw);
      if (static_cast<std::size_t>(row.size()) != cols) {
        throw ParseError("row has " + std::to_string(row.size()) + " entries, expected n = " + std::to_string(cols), rw);
      }
      mat.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return mat;
  }
  const Vector flat = vector_from_json(j, where);
  if (static_cast<std::size_t>(flat.size()) != rows * cols) {
    throw ParseError("flat matrix has " + std::to_string(flat.size()) + " entries, expected m*n = " +
                         std::to_string(rows * cols),
                     where);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[static_cast<Eigen::Index>(r * cols + c)];
    }
  }
  return mat;
}

inline nlohmann::json matrix_to_json(const Matrix& mat) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < mat.cols(); ++c) row.push_back(mat(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline std::size_t dim_field(const nlohmann::json& j, const char* field, const std::string& where) {
  if (!j.contains(field)) throw ParseError("missing field '" + std::string(field) + "'", where);
  const auto& v = j[field];
  if (!v.is_number_unsigned() || v.get<std::size_t>() < 1) {
    throw ParseError("expected a positive integer", where + "/" + field);
  }
  return v.get<std::size_t>();
}

inline MapDescriptor descriptor_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError("descriptor must be a JSON object", where.empty() ? "/" : where);
  if (!j.contains("variant") || !j["variant"].is_string()) {
    throw ParseError("missing or non-string field 'variant'", where + "/variant");
  }
  const std::string variant = j["variant"].get<std::string>();
  const std::size_t n = dim_field(j, "n", where);
  const std::size_t m = dim_field(j, "m", where);
  auto require = [&](const char* field) -> const nlohmann::json& {
    if (!j.contains(field)) throw ParseError("missing field '" + std::string(field) + "'", where + "/" + field);
    return j[field];
  };
  try {
    if (variant == "linear") {
      return MapDescriptor::linear(matrix_from_json(require("matrix"), m, n, where + "/matrix"));
    }
    if (variant == "urysohn") {
      if (m != 1) throw ParseError("urysohn map has m = 1", where + "/m");
      Point a(vector_from_json(require("a"), where + "/a"));
      Point b(vector_from_json(require("b"), where + "/b"));
      if (a.dim() != n) throw ParseError("length of 'a' differs from n", where + "/a");
      if (b.dim() != n) throw ParseError("length of 'b' differs from n", where + "/b");
      if (a == b) throw ParseError("urysohn map requires a != b", where + "/b");
      return MapDescriptor::urysohn(std::move(a), std::move(b));
    }
    if (variant == "axis_tube") {
      if (n < 2) throw ParseError("axis tube map requires n >= 2", where + "/n");
      if (m < 2) throw ParseError("axis tube map requires m >= 2", where + "/m");
      return MapDescriptor::axis_tube(n, m);
    }
    if (variant == "prime_quantizer") {
      auto config = quantizer::config_from_json(require("codec"), where + "/codec");
      if (config.n() != n || config.m() != m) throw ParseError("codec dimensions differ from n, m", where + "/codec");
      return MapDescriptor::prime_quantizer(std::move(config));
    }
    if (variant == "composite") {
      MapDescriptor inner = descriptor_from_json(require("inner"), where + "/inner");
      if (inner.n() != n) throw ParseError("inner map domain differs from n", where + "/inner/n");
      const auto& outer = require("outer");
      if (!outer.is_object()) throw ParseError("outer must be an object", where + "/outer");
      if (!outer.contains("matrix")) throw ParseError("missing field 'matrix'", where + "/outer/matrix");
      Matrix mat = matrix_from_json(outer["matrix"], m, inner.m(), where + "/outer/matrix");
      Vector offset = Vector::Zero(static_cast<Eigen::Index>(m));
      if (outer.contains("offset")) {
        offset = vector_from_json(outer["offset"], where + "/outer/offset");
        if (static_cast<std::size_t>(offset.size()) != m) throw ParseError("offset length differs from m", where + "/outer/offset");
      }
      return MapDescriptor::composite(std::move(mat), std::move(offset), std::move(inner));
    }
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), where.empty() ? "/" : where);
  } catch (const InputError& e) {
    throw ParseError(e.what(), where.empty() ? "/" : where);
  }
  throw ParseError("unknown variant '" + variant + "'", where + "/variant");
}

}  // namespace detail

inline nlohmann::json to_json(const MapDescriptor& map) {
  nlohmann::json j;
  j["variant"] = map.kind();
  j["n"] = map.n();
  j["m"] = map.m();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Linear>) {
          j["matrix"] = detail::matrix_to_json(v.matrix);
        } else if constexpr (std::is_same_v<T, Urysohn>) {
          j["a"] = detail::vector_to_json(v.a.coords());
          j["b"] = detail::vector_to_json(v.b.coords());
        } else if constexpr (std::is_same_v<T, PrimeQuantizer>) {
          j["codec"] = quantizer::config_to_json(v.config);
        } else if constexpr (std::is_same_v<T, Composite>) {
          j["outer"] = {{"matrix", detail::matrix_to_json(v.matrix)}, {"offset", detail::vector_to_json(v.offset)}};
          j["inner"] = to_json(*v.inner);
        }
      },
      map.variant());
  return j;
}

inline std::string serialize(const MapDescriptor& map) { return to_json(map).dump(2); }

/// Parses and validates a descriptor document. Syntax errors carry a
/// line/column location, validation errors a JSON pointer.
inline MapDescriptor parse_descriptor(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  return detail::descriptor_from_json(j, "");
}

inline MapDescriptor from_json(const nlohmann::json& j) { return detail::descriptor_from_json(j, ""); }

}  // namespace fiberaudit::maps
