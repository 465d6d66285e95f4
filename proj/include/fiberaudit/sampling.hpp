#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "fiberaudit/error.hpp"
#include "fiberaudit/geometry.hpp"

namespace fiberaudit::sampling {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'f1be'0d1a'2015ULL;

/// splitmix64 finalizer; used to derive independent streams from a master seed.
constexpr std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix(master ^ mix(stream + 0x632be59bd9b4e019ULL));
}

inline std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned candidate = 2; primes.size() < count; ++candidate) {
    bool is_prime = true;
    for (unsigned p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(candidate);
  }
  return primes;
}

inline double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

/// Halton sequence in [0,1)^dim with a seeded Cranley-Patterson rotation.
class Halton {
 public:
  Halton(std::size_t dim, std::uint64_t seed) : bases_(first_primes(dim)), shift_(dim) {
    std::mt19937_64 rng(mix(seed));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (auto& s : shift_) s = unif(rng);
  }

  std::size_t dim() const { return bases_.size(); }

  Vector point(std::uint64_t index) const {
    Vector v(static_cast<Eigen::Index>(bases_.size()));
    for (std::size_t k = 0; k < bases_.size(); ++k) {
      double x = radical_inverse(index + 1, bases_[k]) + shift_[k];
      if (x >= 1.0) x -= 1.0;
      v[static_cast<Eigen::Index>(k)] = x;
    }
    return v;
  }

 private:
  std::vector<unsigned> bases_;
  std::vector<double> shift_;
};

/// Axis-aligned box [lo_i, hi_i].
struct Box {
  Vector lo;
  Vector hi;

  Box(Vector lower, Vector upper) : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size() || lo.size() < 1) throw InputError("box bounds must have equal nonzero dimension");
    if (!lo.allFinite() || !hi.allFinite()) throw InputError("box bounds must be finite");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (!(lo[i] < hi[i])) throw InputError("box is degenerate in coordinate " + std::to_string(i));
    }
  }

  static Box cube(std::size_t n, double lower, double upper) {
    const auto k = static_cast<Eigen::Index>(n);
    return Box(Vector::Constant(k, lower), Vector::Constant(k, upper));
  }

  std::size_t dim() const { return static_cast<std::size_t>(lo.size()); }
  Vector map(const Vector& unit) const { return lo + (hi - lo).cwiseProduct(unit); }
};

/// Low-discrepancy directions on the unit sphere S^{dim-1}: Halton points
/// pushed through the inverse normal CDF and normalized.
class SphereDirections {
 public:
  SphereDirections(std::size_t dim, std::uint64_t seed) : halton_(dim, seed) {}

  Vector direction(std::uint64_t index) const {
    const Vector h = halton_.point(index);
    Vector g(h.size());
    for (Eigen::Index k = 0; k < h.size(); ++k) {
      const double p = std::clamp(h[k], 1e-12, 1.0 - 1e-12);
      g[k] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * p - 1.0);
    }
    const double norm = g.norm();
    if (norm < 1e-300) {
      g.setZero();
      g[0] = 1.0;
      return g;
    }
    return g / norm;
  }

 private:
  Halton halton_;
};

}  // namespace fiberaudit::sampling
