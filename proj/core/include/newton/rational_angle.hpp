#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "newton/errors.hpp"

namespace newton {

/// Exact rational angle in [0,1), reduced to lowest terms. Denominators are
/// capped at 2^20 so pullback chains fail loudly instead of overflowing.
struct Angle {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static constexpr std::int64_t kDenCap = 1 << 20;

  Angle() = default;
  Angle(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den <= 0) throw Error(ErrorCode::InvalidArgument, "angle denominator must be positive");
    num %= den;
    if (num < 0) num += den;
    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (den > kDenCap) {
      throw Error(ErrorCode::InvalidArgument,
                  "angle denominator exceeds cap: " + std::to_string(den));
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// Angle multiplication mod 1 (image angle under a degree-m chart).
  Angle times(std::int64_t m) const { return Angle(num * m, den); }

  /// The m preimage angles (this + j)/m, j = 0..m-1.
  Angle lift(std::int64_t m, std::int64_t j) const { return Angle(num + j * den, den * m); }

  bool operator==(const Angle& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Angle& o) const { return !(*this == o); }
  bool operator<(const Angle& o) const {
    // exact cross comparison; values fit in 64-bit well below the cap
    return num * o.den < o.num * den;
  }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  static Angle parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
      return Angle(std::stoll(s), 1);
    }
    return Angle(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }
};

/// Counter-clockwise arc length from a to b in units of full turns, in (0,1].
inline double ccw_span(const Angle& a, const Angle& b) {
  double d = b.value() - a.value();
  while (d <= 0.0) d += 1.0;
  return d;
}

}  // namespace newton
