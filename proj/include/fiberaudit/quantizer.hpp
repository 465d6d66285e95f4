#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "fiberaudit/error.hpp"
#include "fiberaudit/geometry.hpp"
#include "fiberaudit/sampling.hpp"

// Discontinuous grid codec whose fibers are half-open cubes of edge eps.
//
// Each input coordinate i falls in cell k_i = floor(x_i / eps). A cell is
// encoded as, per output slot, a product of prime powers prod p^(-e) with
// e = |k_i| and the prime chosen by the sign of k_i. Distinct primes make
// the code injective on cells (unique factorization), so every nonempty
// fiber is exactly one cell: diameter eps * sqrt(n).
//
// Two prime schemes exist:
//  - PerCoordinate: coordinate i owns a (positive-side, negative-side)
//    prime pair; coordinates are split contiguously across the m slots.
//  - Quadrant: n = 2, m = 1 only. The prime pair depends on the quadrant:
//    (+,+) -> 2,3   (-,+) -> 5,7   (+,-) -> 11,13   (-,-) -> 17,19.
//    With eps = 1 this is the classic four-branch example map.
namespace fiberaudit::quantizer {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using geometry::Point;

enum class PrimeScheme { PerCoordinate, Quadrant };

struct PrimePair {
  std::uint64_t positive;
  std::uint64_t negative;
  friend bool operator==(const PrimePair&, const PrimePair&) = default;
};

/// Primes used by the quadrant scheme for quadrant q = (x < 0) + 2 (y < 0).
constexpr PrimePair quadrant_pair(int q) {
  constexpr PrimePair table[4] = {{2, 3}, {5, 7}, {11, 13}, {17, 19}};
  return table[q];
}

class CodecConfig {
 public:
  /// Explicit per-coordinate configuration. `partition[i]` is the output
  /// slot of input coordinate i; `primes[i]` its prime pair.
  CodecConfig(std::size_t n, std::size_t m, double eps, std::vector<std::size_t> partition,
              std::vector<PrimePair> primes)
      : scheme_(PrimeScheme::PerCoordinate),
        n_(n),
        m_(m),
        eps_(eps),
        partition_(std::move(partition)),
        primes_(std::move(primes)) {
    validate_common();
    if (partition_.size() != n_) throw ConfigError("partition must assign each of the n coordinates");
    if (primes_.size() != n_) throw ConfigError("prime table must have one pair per coordinate");
    std::vector<std::size_t> per_slot(m_, 0);
    for (auto s : partition_) {
      if (s >= m_) throw ConfigError("partition refers to slot " + std::to_string(s) + " >= m");
      ++per_slot[s];
    }
    for (std::size_t j = 0; j < m_; ++j) {
      if (per_slot[j] == 0) throw ConfigError("output slot " + std::to_string(j) + " has no coordinates");
    }
    std::vector<std::uint64_t> all;
    for (const auto& pp : primes_) {
      if (!is_prime(pp.positive) || !is_prime(pp.negative)) throw ConfigError("prime table entry is not prime");
      all.push_back(pp.positive);
      all.push_back(pp.negative);
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw ConfigError("prime table entries must be distinct");
  }

  /// Default generalization: contiguous, as-even-as-possible partition and
  /// consecutive primes 2,3,5,7,... two per coordinate.
  static CodecConfig general(std::size_t n, std::size_t m, double eps) {
    if (m == 0 || n <= m) throw ConfigError("codec needs n > m >= 1");
    std::vector<std::size_t> partition(n);
    const std::size_t base = n / m;
    const std::size_t extra = n % m;
    std::size_t i = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t count = base + (j < extra ? 1 : 0);
      for (std::size_t c = 0; c < count; ++c) partition[i++] = j;
    }
    const auto ps = sampling::first_primes(2 * n);
    std::vector<PrimePair> primes(n);
    for (std::size_t k = 0; k < n; ++k) primes[k] = {ps[2 * k], ps[2 * k + 1]};
    return CodecConfig(n, m, eps, std::move(partition), std::move(primes));
  }

  /// Four-branch quadrant table on R^2 -> R; eps = 1 gives the reference map.
  static CodecConfig quadrant(double eps = 1.0) { return CodecConfig(eps); }

  PrimeScheme scheme() const { return scheme_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  double eps() const { return eps_; }
  const std::vector<std::size_t>& partition() const { return partition_; }
  const std::vector<PrimePair>& primes() const { return primes_; }

  bool is_reference_example() const { return scheme_ == PrimeScheme::Quadrant && eps_ == 1.0; }

  friend bool operator==(const CodecConfig&, const CodecConfig&) = default;

  static bool is_prime(std::uint64_t v) {
    if (v < 2) return false;
    for (std::uint64_t d = 2; d * d <= v; ++d) {
      if (v % d == 0) return false;
    }
    return true;
  }

 private:
  explicit CodecConfig(double eps)
      : scheme_(PrimeScheme::Quadrant), n_(2), m_(1), eps_(eps), partition_{0, 0}, primes_{} {
    validate_common();
  }

  void validate_common() const {
    if (m_ == 0 || n_ <= m_) throw ConfigError("codec needs n > m >= 1");
    if (!(eps_ > 0.0) || !std::isfinite(eps_)) throw ConfigError("codec eps must be positive and finite");
  }

  PrimeScheme scheme_;
  std::size_t n_;
  std::size_t m_;
  double eps_;
  std::vector<std::size_t> partition_;
  std::vector<PrimePair> primes_;
};

/// Per-coordinate cell indices k_i = floor(x_i / eps).
struct CellIndex {
  std::vector<std::int64_t> k;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct Factor {
  std::uint64_t prime;
  std::int64_t exponent;  // >= 1
  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Exact code: per output slot, prime factors sorted ascending; the slot's
/// value is prod prime^(-exponent).
struct PrimeCode {
  std::vector<std::vector<Factor>> slots;
  friend bool operator==(const PrimeCode&, const PrimeCode&) = default;
};

inline constexpr double kMaxCellIndex = 4.0e18;

inline CellIndex cell_of(const CodecConfig& config, const Point& x) {
  if (x.dim() != config.n()) {
    throw InputError("codec expects dimension " + std::to_string(config.n()) + ", got " + std::to_string(x.dim()));
  }
  CellIndex cell;
  cell.k.reserve(config.n());
  for (std::size_t i = 0; i < config.n(); ++i) {
    const double q = std::floor(x[i] / config.eps());
    if (!std::isfinite(q) || std::abs(q) > kMaxCellIndex) throw InputError("coordinate out of codec range");
    cell.k.push_back(static_cast<std::int64_t>(q));
  }
  return cell;
}

namespace detail {

inline std::int64_t magnitude(std::int64_t k) { return k < 0 ? -k : k; }

inline void sort_slots(PrimeCode& code) {
  for (auto& slot : code.slots) {
    std::sort(slot.begin(), slot.end(), [](const Factor& a, const Factor& b) { return a.prime < b.prime; });
  }
}

}  // namespace detail

inline PrimeCode code_of_cell(const CodecConfig& config, const CellIndex& cell) {
  if (cell.k.size() != config.n()) throw InputError("cell index has wrong dimension");
  PrimeCode code;
  code.slots.resize(config.m());
  if (config.scheme() == PrimeScheme::Quadrant) {
    const int q = (cell.k[0] < 0 ? 1 : 0) + (cell.k[1] < 0 ? 2 : 0);
    const PrimePair pp = quadrant_pair(q);
    if (cell.k[0] != 0) code.slots[0].push_back({pp.positive, detail::magnitude(cell.k[0])});
    if (cell.k[1] != 0) code.slots[0].push_back({pp.negative, detail::magnitude(cell.k[1])});
  } else {
    for (std::size_t i = 0; i < config.n(); ++i) {
      const std::int64_t k = cell.k[i];
      if (k == 0) continue;
      const PrimePair& pp = config.primes()[i];
      code.slots[config.partition()[i]].push_back({k > 0 ? pp.positive : pp.negative, detail::magnitude(k)});
    }
  }
  detail::sort_slots(code);
  return code;
}

inline PrimeCode encode(const CodecConfig& config, const Point& x) { return code_of_cell(config, cell_of(config, x)); }

/// Inverse of code_of_cell. Throws FormatError on any code that
/// code_of_cell cannot produce.
inline CellIndex cell_of_code(const CodecConfig& config, const PrimeCode& code) {
  if (code.slots.size() != config.m()) {
    throw FormatError("code has " + std::to_string(code.slots.size()) + " slots, config expects " +
                      std::to_string(config.m()));
  }
  for (const auto& slot : code.slots) {
    for (std::size_t f = 0; f < slot.size(); ++f) {
      if (slot[f].exponent < 1) throw FormatError("code exponents must be >= 1");
      if (f > 0 && !(slot[f - 1].prime < slot[f].prime)) throw FormatError("code primes must be strictly ascending");
    }
  }
  CellIndex cell{std::vector<std::int64_t>(config.n(), 0)};
  if (config.scheme() == PrimeScheme::Quadrant) {
    const auto& slot = code.slots[0];
    auto has = [&](std::uint64_t p) {
      return std::any_of(slot.begin(), slot.end(), [p](const Factor& f) { return f.prime == p; });
    };
    const bool neg_x = has(5) || has(17);
    const bool neg_y = has(13) || has(19);
    const PrimePair pp = quadrant_pair((neg_x ? 1 : 0) + (neg_y ? 2 : 0));
    for (const auto& f : slot) {
      if (f.prime == pp.positive) {
        cell.k[0] = neg_x ? -f.exponent : f.exponent;
      } else if (f.prime == pp.negative) {
        cell.k[1] = neg_y ? -f.exponent : f.exponent;
      } else {
        throw FormatError("prime " + std::to_string(f.prime) + " is not valid in this quadrant code");
      }
    }
    return cell;
  }
  std::map<std::uint64_t, std::pair<std::size_t, bool>> owner;  // prime -> (coordinate, negative side)
  for (std::size_t i = 0; i < config.n(); ++i) {
    owner[config.primes()[i].positive] = {i, false};
    owner[config.primes()[i].negative] = {i, true};
  }
  std::vector<bool> seen(config.n(), false);
  for (std::size_t j = 0; j < code.slots.size(); ++j) {
    for (const auto& f : code.slots[j]) {
      const auto it = owner.find(f.prime);
      if (it == owner.end()) throw FormatError("unknown prime " + std::to_string(f.prime) + " in code");
      const auto [i, negative] = it->second;
      if (config.partition()[i] != j) {
        throw FormatError("prime " + std::to_string(f.prime) + " does not belong to slot " + std::to_string(j));
      }
      if (seen[i]) throw FormatError("two primes of coordinate " + std::to_string(i) + " present in code");
      seen[i] = true;
      cell.k[i] = negative ? -f.exponent : f.exponent;
    }
  }
  return cell;
}

inline Point cell_center(const CodecConfig& config, const CellIndex& cell) {
  Vector c(static_cast<Eigen::Index>(config.n()));
  for (std::size_t i = 0; i < config.n(); ++i) {
    c[static_cast<Eigen::Index>(i)] = (static_cast<double>(cell.k[i]) + 0.5) * config.eps();
  }
  return Point(std::move(c));
}

/// Center of the encoded cell: within (eps/2) sqrt(n) of every point of it.
inline Point decode(const CodecConfig& config, const PrimeCode& code) {
  return cell_center(config, cell_of_code(config, code));
}

/// Exact slot values 1 / prod prime^exponent.
inline std::vector<Rational> code_to_rational(const PrimeCode& code) {
  std::vector<Rational> out;
  out.reserve(code.slots.size());
  for (const auto& slot : code.slots) {
    Integer den = 1;
    for (const auto& f : slot) den *= boost::multiprecision::pow(Integer(f.prime), static_cast<unsigned>(f.exponent));
    out.emplace_back(Integer(1), den);
  }
  return out;
}

/// Floating view of the slot values; underflows to 0 for deep cells.
inline Vector code_value(const PrimeCode& code) {
  Vector v(static_cast<Eigen::Index>(code.slots.size()));
  for (std::size_t j = 0; j < code.slots.size(); ++j) {
    double value = 1.0;
    for (const auto& f : code.slots[j]) value *= std::pow(static_cast<double>(f.prime), -static_cast<double>(f.exponent));
    v[static_cast<Eigen::Index>(j)] = value;
  }
  return v;
}

/// Supremum of distances inside one half-open cell: eps * sqrt(n).
inline double fiber_diameter(const CodecConfig& config) {
  return config.eps() * std::sqrt(static_cast<double>(config.n()));
}

/// Exact L1 norm of the reference quadrant map (eps = 1): each quadrant
/// contributes a product of two geometric series,
///   sum_{e>=e0} p^{-e} = p^{-e0} * p / (p - 1),
/// with e0 = 0 on the nonnegative side and e0 = 1 on the negative side.
inline Rational l1_norm_closed_form(const CodecConfig& config) {
  if (!config.is_reference_example()) {
    throw ConfigError("closed-form L1 norm is only available for the quadrant codec with eps = 1");
  }
  auto series = [](std::uint64_t p, bool from_one) {
    const Rational full(Integer(p), Integer(p - 1));
    return from_one ? full / Rational(Integer(p)) : full;
  };
  Rational total = 0;
  for (int q = 0; q < 4; ++q) {
    const PrimePair pp = quadrant_pair(q);
    total += series(pp.positive, (q & 1) != 0) * series(pp.negative, (q & 2) != 0);
  }
  return total;
}

/// Sup norm: every slot value is a product of factors <= 1, and the cell
/// at the origin has the empty product.
inline Rational linf_norm(const CodecConfig& config) {
  (void)config;
  return Rational(1);
}

// ---- JSON wire formats -----------------------------------------------------

inline nlohmann::json config_to_json(const CodecConfig& config) {
  nlohmann::json j;
  j["n"] = config.n();
  j["m"] = config.m();
  j["eps"] = config.eps();
  if (config.scheme() == PrimeScheme::Quadrant) {
    j["scheme"] = "quadrant";
  } else {
    j["scheme"] = "per_coordinate";
    j["partition"] = config.partition();
    nlohmann::json primes = nlohmann::json::array();
    for (const auto& pp : config.primes()) primes.push_back({pp.positive, pp.negative});
    j["primes"] = primes;
  }
  return j;
}

inline CodecConfig config_from_json(const nlohmann::json& j, const std::string& where = "") {
  auto fail = [&](const std::string& msg, const std::string& field) -> ParseError {
    return ParseError(msg, where + "/" + field);
  };
  if (!j.is_object()) throw ParseError("codec config must be an object", where.empty() ? "/" : where);
  for (const char* field : {"n", "m", "eps"}) {
    if (!j.contains(field)) throw fail("missing field", field);
  }
  if (!j["n"].is_number_unsigned()) throw fail("expected a positive integer", "n");
  if (!j["m"].is_number_unsigned()) throw fail("expected a positive integer", "m");
  if (!j["eps"].is_number()) throw fail("expected a number", "eps");
  const auto n = j["n"].get<std::size_t>();
  const auto m = j["m"].get<std::size_t>();
  const double eps = j["eps"].get<double>();
  const std::string scheme = j.value("scheme", std::string("per_coordinate"));
  try {
    if (scheme == "quadrant") {
      if (n != 2 || m != 1) throw fail("quadrant scheme requires n = 2, m = 1", "scheme");
      return CodecConfig::quadrant(eps);
    }
    if (scheme != "per_coordinate") throw fail("unknown scheme '" + scheme + "'", "scheme");
    if (!j.contains("partition") && !j.contains("primes")) return CodecConfig::general(n, m, eps);
    CodecConfig defaults = CodecConfig::general(n, m, eps);
    std::vector<std::size_t> partition = defaults.partition();
    std::vector<PrimePair> primes = defaults.primes();
    if (j.contains("partition")) partition = j["partition"].get<std::vector<std::size_t>>();
    if (j.contains("primes")) {
      primes.clear();
      for (const auto& pair : j["primes"]) {
        if (!pair.is_array() || pair.size() != 2) throw fail("each prime entry must be [positive, negative]", "primes");
        primes.push_back({pair[0].get<std::uint64_t>(), pair[1].get<std::uint64_t>()});
      }
    }
    return CodecConfig(n, m, eps, std::move(partition), std::move(primes));
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), where.empty() ? "/" : where);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), where.empty() ? "/" : where);
  }
}

/// `{"slots": [[[p, e], ...], ...]}`
inline nlohmann::json code_to_json(const PrimeCode& code) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& slot : code.slots) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& f : slot) s.push_back({f.prime, f.exponent});
    slots.push_back(s);
  }
  return nlohmann::json{{"slots", slots}};
}

inline PrimeCode code_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("slots") || !j["slots"].is_array()) {
    throw FormatError("code must be an object with a 'slots' array");
  }
  PrimeCode code;
  for (const auto& s : j["slots"]) {
    if (!s.is_array()) throw FormatError("each slot must be an array of [prime, exponent] pairs");
    std::vector<Factor> slot;
    for (const auto& f : s) {
      if (!f.is_array() || f.size() != 2 || !f[0].is_number_unsigned() || !f[1].is_number_integer()) {
        throw FormatError("factor must be [prime, exponent] with integer entries");
      }
      slot.push_back({f[0].get<std::uint64_t>(), f[1].get<std::int64_t>()});
    }
    code.slots.push_back(std::move(slot));
  }
  return code;
}

}  // namespace fiberaudit::quantizer
