/* common.hpp -- shared error types, exact rationals, hashing, seeded sampling */

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace selfsim {

inline constexpr std::string_view kVersion = "0.1.0";

// Attached to every report computed over a free-group model: finite orbifold
// weights (torsion quotients) are not modeled, so verdicts speak about the
// free punctured-sphere group only.
inline constexpr std::string_view kFreeModelCaveat =
    "free-model computation: finite orbifold weights (torsion quotients) are "
    "not modeled; the verdict applies to the free punctured-sphere group";

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed files, words, or cross-references in input data.
struct ParseError : Error {
  using Error::Error;
};

// Operation applied to an element of the wrong group model.
struct ModelError : Error {
  using Error::Error;
};

// A hard size limit was exceeded (table sizes, vertex budgets).
struct BudgetError : Error {
  using Error::Error;
};

// FNV-1a, used to fingerprint input files inside reports.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Exact nonnegative rational, normalized with gcd; denominator > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw Error("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
};

// Exact integer n-th root, if one exists.
inline std::optional<std::int64_t> integer_root(std::int64_t v, int n) {
  if (v < 0 || n < 1) return std::nullopt;
  if (v <= 1 || n == 1) return v;
  auto r = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / n)));
  for (std::int64_t c = (r > 1 ? r - 1 : 0); c <= r + 1; ++c) {
    std::int64_t p = 1;
    bool overflow = false;
    for (int i = 0; i < n; ++i) {
      if (c != 0 && p > v / c + 1) {
        overflow = true;
        break;
      }
      p *= c;
    }
    if (!overflow && p == v) return c;
  }
  return std::nullopt;
}

inline std::optional<Rational> exact_root(const Rational& q, int n) {
  auto rn = integer_root(q.num, n);
  auto rd = integer_root(q.den, n);
  if (rn && rd) return Rational(*rn, *rd);
  return std::nullopt;
}

// Seeded sampler with rejection-based bounded draws, stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw Error("Rng::below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace selfsim
