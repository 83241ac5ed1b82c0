#pragma once

#include <string>
#include <vector>

#include "newton/errors.hpp"
#include "newton/sphere.hpp"

namespace newton {

struct RootEntry {
  cplx location;
  int multiplicity = 1;
};

/// A polynomial in factored form: leading * prod (z - a_k)^{n_k} with
/// pairwise distinct a_k. This is the canonical input object of the library.
struct PolynomialSpec {
  cplx leading{1.0, 0.0};
  std::vector<RootEntry> roots;

  int distinct_count() const { return static_cast<int>(roots.size()); }

  int total_degree() const {
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
  }

  /// At least three distinct roots (the quadratic case is classical).
  bool non_trivial() const { return distinct_count() >= 3; }

  bool all_simple() const {
    for (const auto& r : roots)
      if (r.multiplicity != 1) return false;
    return true;
  }

  double min_separation() const;

  /// Checks field invariants; throws InvalidArgument on violation.
  void validate(double merge_tol = 1e-8) const;

  std::string to_json() const;
  static PolynomialSpec from_json(const std::string& text);
};

struct EvalResult {
  cplx p, dp, ddp;
};

/// Evaluates p, p', p'' at a finite point from the factored form. Uses
/// logarithmic derivatives away from roots and the explicit product form in
/// a neighborhood of the nearest root.
EvalResult eval_all(const PolynomialSpec& spec, cplx z);

inline cplx eval_p(const PolynomialSpec& spec, cplx z) { return eval_all(spec, z).p; }
inline cplx eval_dp(const PolynomialSpec& spec, cplx z) { return eval_all(spec, z).dp; }
inline cplx eval_ddp(const PolynomialSpec& spec, cplx z) { return eval_all(spec, z).ddp; }

/// Coefficients of p in ascending order (degree total_degree()).
std::vector<cplx> expand_coefficients(const PolynomialSpec& spec);

/// Derivative of a coefficient vector (ascending order).
std::vector<cplx> differentiate(const std::vector<cplx>& coeffs);

/// Horner evaluation of an ascending coefficient vector.
cplx horner(const std::vector<cplx>& coeffs, cplx z);

/// prod over distinct roots of (z - a_k), ascending coefficients (monic).
std::vector<cplx> distinct_product(const PolynomialSpec& spec);

/// T(z) = sum_k n_k prod_{j != k} (z - a_j). This is the denominator of the
/// Newton map in lowest terms: f = (z T - prod) / T, deg T = d - 1.
std::vector<cplx> reduced_denominator(const PolynomialSpec& spec);

}  // namespace newton
