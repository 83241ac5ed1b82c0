#pragma once

#include <optional>
#include <string>
#include <vector>

#include "newton/polynomial.hpp"
#include "newton/roots.hpp"
#include "newton/sphere.hpp"

namespace newton {

enum class FixedPointKind { Superattracting, Attracting, Repelling };

struct FixedPointRecord {
  SpherePoint location;
  cplx multiplier;
  FixedPointKind kind;
  int root_multiplicity = 0;  // n_k for root records, 0 for the infinity record
};

struct PoleRecord {
  cplx location;
  int order = 1;  // order of the pole = local degree of f there
};

struct CriticalPoint {
  SpherePoint location;
  int local_degree = 2;
};

/// The Newton map f = z - p/p' of a factored polynomial, held in lowest
/// terms f = (z T - prod(z - a_k)) / T with T = reduced_denominator. Degree
/// equals the number of distinct roots. Immutable and safe to share across
/// threads.
class NewtonMap {
 public:
  explicit NewtonMap(PolynomialSpec spec, double merge_tol = 1e-8);

  const PolynomialSpec& spec() const { return spec_; }
  int degree() const { return spec_.distinct_count(); }
  double merge_tol() const { return merge_tol_; }

  /// f on the sphere; total (poles go to infinity, infinity is fixed,
  /// multiple roots are removable).
  SpherePoint eval(const SpherePoint& z) const;

  /// f' at a finite non-pole point (the multiplier field form 1 + S'/S^2).
  cplx derivative(cplx z) const;

  /// d + 1 records: the d roots plus the repelling point at infinity.
  const std::vector<FixedPointRecord>& fixed_points() const { return fixed_points_; }

  /// Finite poles of f with orders; sum of orders is d - 1.
  const std::vector<PoleRecord>& poles() const;

  /// Finite critical points with local degrees; multiplicities sum to 2d - 2.
  const std::vector<CriticalPoint>& critical_points() const;

  /// All d solutions of f(z) = w counted with multiplicity. For w = infinity
  /// returns the poles (order = multiplicity) plus infinity itself.
  std::vector<SpherePoint> preimages(const SpherePoint& w) const;

  /// Same, but each solution listed once with its multiplicity.
  std::vector<ClusteredRoot> fiber(const SpherePoint& w) const;

  /// Ascending coefficients of the fiber polynomial z T(z) - prod(z-a_k) - w T(z).
  std::vector<cplx> fiber_polynomial(cplx w) const;

  const std::vector<cplx>& denominator() const { return denom_; }

  /// Nearest root of p to z, with its distance.
  std::pair<int, double> nearest_root(cplx z) const;

 private:
  PolynomialSpec spec_;
  double merge_tol_;
  std::vector<cplx> denom_;          // T, ascending
  std::vector<cplx> prod_distinct_;  // prod (z - a_k), ascending
  std::vector<FixedPointRecord> fixed_points_;
  mutable std::vector<PoleRecord> poles_;
  mutable bool poles_ready_ = false;
  mutable std::vector<CriticalPoint> criticals_;
  mutable bool criticals_ready_ = false;
};

struct HeadCandidate {
  SpherePoint location;
  cplx multiplier;
};

struct HeadCheckResult {
  bool accepted = false;
  std::string reason;
  std::vector<int> multiplicities;       // aligned with finite candidates
  std::optional<PolynomialSpec> reconstructed;  // leading fixed to 1
};

/// Decides whether a putative set of fixed points with multipliers comes from
/// a Newton map: exactly one entry at infinity, every finite multiplier of
/// the form 1 - 1/n with integral n >= 1, locations distinct. On acceptance
/// reconstructs the polynomial up to the free leading factor.
HeadCheckResult head_check(const std::vector<HeadCandidate>& candidates, double tol = 1e-6);

}  // namespace newton
