#pragma once

#include <functional>
#include <vector>

#include "newton/newton_map.hpp"
#include "newton/sphere.hpp"

namespace newton {

/// A sampled Jordan curve: a cyclic polyline of finite samples with a
/// designated interior side. Curves that conceptually pass through infinity
/// are represented by excising a chordal delta-neighborhood of infinity and
/// closing along its boundary; the designated interior may then be the
/// unbounded side.
struct SampledCurve {
  std::vector<cplx> points;     // cyclic, >= 64 after validation
  bool positive = true;         // stored order is counter-clockwise
  bool interior_bounded = true; // designated interior = bounded side?

  static SampledCurve circle(cplx center, double radius, int n = 256,
                             bool interior_bounded = true);

  /// Simplicity and sample-count invariants; throws on violation.
  void validate() const;

  double distance_to(cplx z) const;

  /// +1 if z is enclosed by the polyline (nonzero winding), else 0.
  /// Throws PointOnCurve if z is within tol of the polyline.
  int encloses(cplx z, double tol = 1e-9) const;

  /// True if z lies on the designated interior side.
  bool in_designated_interior(cplx z, double tol = 1e-9) const;
};

struct CountResult {
  int value = 0;
  double residual = 0.0;
};

/// Map interface used by the counting oracles: an iterate f^k of a Newton
/// map, with derivative and the pole set (iterated preimages of infinity
/// that reach it within k steps, with orders).
class IterateView {
 public:
  IterateView(const NewtonMap& map, int k = 1);

  cplx eval(cplx z) const;
  cplx derivative(cplx z) const;
  const std::vector<PoleRecord>& poles() const { return poles_; }
  const NewtonMap& base() const { return *map_; }
  int power() const { return k_; }

 private:
  const NewtonMap* map_;
  int k_;
  std::vector<PoleRecord> poles_;
};

/// Winding number of the polyline around z0, by exact argument summation.
int winding_number(const SampledCurve& curve, cplx z0, double tol = 1e-9);

/// Number of fixed points of g (finite ones, counted with multiplicity) on
/// the designated interior side. Contour integral of (g'-1)/(g-z) with
/// adaptive trapezoid refinement, corrected by the orders of enclosed poles
/// (and the simple pole of g - z at infinity when the region is unbounded).
CountResult count_fixed_points(const IterateView& g, const SampledCurve& curve);

/// Number of preimages of the basepoint on the designated interior side,
/// counted with multiplicity: winding of g along the curve around the
/// basepoint plus enclosed-pole corrections. For small curves around a
/// regular point this is the covering degree deg(g|curve).
CountResult boundary_degree(const IterateView& g, const SampledCurve& curve, cplx basepoint);

/// Zeros of p' on the designated interior side, via the logarithmic
/// integral of p''/p'.
CountResult count_zeros_dp(const NewtonMap& map, const SampledCurve& curve);

/// count_zeros_dp minus the removable zeros at enclosed multiple roots:
/// the number of poles of f (with multiplicity) on the interior side.
CountResult pole_count_in(const NewtonMap& map, const SampledCurve& curve);

struct FixDegreeReport {
  bool passed = false;
  int fix_count = 0;          // fixed points of f in the closure of U (infinity included)
  int degree = 0;             // total covering degree of f over the boundary of U
  int boundary_components = 0;
  bool homeomorphism_case = false;  // both sides equal one
  bool unbounded = false;
  std::vector<std::vector<cplx>> boundary;  // traced boundary polylines
};

/// Traces the component U of f^{-1}(designated interior of D) containing the
/// seed, checks U is contained in that interior, and verifies that the number
/// of fixed points of f in the closure of U equals the covering degree of f
/// over its boundary. Both sides are computed independently (contour count
/// vs. image winding).
FixDegreeReport verify_fix_eq_degree(const NewtonMap& map, const SampledCurve& D, cplx seed);

/// Pairwise-independence test: finite intersections and disjoint designated
/// interiors, checked on samples. Throws NotIndependent on failure.
void check_independent(const std::vector<SampledCurve>& curves);

/// Poles of f (order convention: multiplicity of the underlying zero of p')
/// in the closure of the common exterior of the given independent curves.
/// Inclusion-exclusion of pole_count_in over the designated interiors.
CountResult region_pole_count(const NewtonMap& map, const std::vector<SampledCurve>& curves);

/// Lifts the closed polyline through f by continuation: all connected
/// components of f^{-1}(curve), each with its covering degree.
struct LiftedCurve {
  std::vector<cplx> points;
  int degree = 1;
};
std::vector<LiftedCurve> lift_closed_curve(const NewtonMap& map, const std::vector<cplx>& image,
                                           double step_tol = 1e-10);

}  // namespace newton
