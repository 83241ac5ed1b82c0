#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace newton {

using cplx = std::complex<double>;

constexpr double kInfChartThreshold = 1e6;  // switch to the w = 1/z chart past this

/// A point on the Riemann sphere: either a finite complex number or the
/// point at infinity.
struct SpherePoint {
  cplx z{0.0, 0.0};
  bool at_inf = false;

  SpherePoint() = default;
  SpherePoint(cplx value) : z(value) {}
  SpherePoint(double re, double im) : z(re, im) {}

  static SpherePoint infinity() {
    SpherePoint p;
    p.at_inf = true;
    return p;
  }

  bool finite() const { return !at_inf; }
};

inline bool sphere_valid(const SpherePoint& p) {
  return p.at_inf || (std::isfinite(p.z.real()) && std::isfinite(p.z.imag()));
}

/// Chordal distance on the sphere, normalized so the diameter is 2.
inline double chordal(const SpherePoint& a, const SpherePoint& b) {
  if (a.at_inf && b.at_inf) return 0.0;
  if (a.at_inf || b.at_inf) {
    const cplx& z = a.at_inf ? b.z : a.z;
    return 2.0 / std::sqrt(1.0 + std::norm(z));
  }
  return 2.0 * std::abs(a.z - b.z) /
         std::sqrt((1.0 + std::norm(a.z)) * (1.0 + std::norm(b.z)));
}

inline double chordal(const cplx& a, const cplx& b) {
  return chordal(SpherePoint(a), SpherePoint(b));
}

inline double chordal_to_inf(const cplx& z) {
  return 2.0 / std::sqrt(1.0 + std::norm(z));
}

/// Treats very large finite values as the point at infinity; used when a
/// numeric orbit blows past the 1/z chart switch.
inline SpherePoint clamp_to_sphere(const cplx& z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
      std::abs(z) > 1e300) {
    return SpherePoint::infinity();
  }
  return SpherePoint(z);
}

/// Embeds the sphere point in R^3 on the unit sphere (stereographic inverse);
/// handy for exact chordal diameters of point sets.
struct Vec3 {
  double x, y, z;
};

inline Vec3 embed(const SpherePoint& p) {
  if (p.at_inf) return {0.0, 0.0, 1.0};
  double n = std::norm(p.z);
  double d = 1.0 + n;
  return {2.0 * p.z.real() / d, 2.0 * p.z.imag() / d, (n - 1.0) / d};
}

inline double chordal_from_embedded(const Vec3& a, const Vec3& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace newton
