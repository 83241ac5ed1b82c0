#pragma once

#include <vector>

#include "newton/sphere.hpp"

namespace newton {

struct SolveOptions {
  int max_iterations = 400;
  double residual_factor = 1e-10;  // accept when |q(z)| < factor * sum |c_k||z|^k
  double cluster_tol = 1e-6;       // coincident-zero clustering (absolute, scale-aware)
};

struct ClusteredRoot {
  cplx location;
  int multiplicity = 1;
};

/// All roots of the polynomial with ascending coefficients, listed with
/// repetition. Aberth-Ehrlich simultaneous iteration with a residual
/// acceptance check; throws RootFindingDiverged on failure.
std::vector<cplx> aberth_roots(const std::vector<cplx>& coeffs, const SolveOptions& opts = {});

/// Groups numerically coincident roots and polishes cluster centers on the
/// appropriate derivative so multiple zeros are located to full accuracy.
std::vector<ClusteredRoot> cluster_roots(const std::vector<cplx>& roots,
                                         const std::vector<cplx>& coeffs,
                                         const SolveOptions& opts = {});

/// aberth_roots + cluster_roots in one call.
std::vector<ClusteredRoot> solve_polynomial(const std::vector<cplx>& coeffs,
                                            const SolveOptions& opts = {});

}  // namespace newton
