#include "newton/roots.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "newton/errors.hpp"
#include "newton/polynomial.hpp"

namespace newton {

namespace {

// p and p' at z by Horner, plus the magnitude bound sum |c_k| |z|^k used in
// the backward-error acceptance test.
struct HornerEval {
  cplx p, dp;
  double bound;
};

HornerEval horner_with_bound(const std::vector<cplx>& c, cplx z) {
  cplx p = 0.0, dp = 0.0;
  double bound = 0.0;
  double az = std::abs(z);
  for (std::size_t i = c.size(); i-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[i];
    bound = bound * az + std::abs(c[i]);
  }
  return {p, dp, bound};
}

}  // namespace

std::vector<cplx> aberth_roots(const std::vector<cplx>& coeffs_in, const SolveOptions& opts) {
  std::vector<cplx> c = coeffs_in;
  while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
  if (c.size() <= 1) return {};

  // strip exact zero roots (leading zero coefficients in ascending order)
  std::vector<cplx> zeros;
  while (c.size() > 1 && std::abs(c.front()) == 0.0) {
    zeros.push_back(cplx(0.0));
    c.erase(c.begin());
  }
  int deg = static_cast<int>(c.size()) - 1;
  if (deg == 0) return zeros;
  if (deg == 1) {
    zeros.push_back(-c[0] / c[1]);
    return zeros;
  }

  // Cauchy-style radius for the initial configuration
  double lead = std::abs(c.back());
  double radius = 0.0;
  for (int i = 0; i < deg; ++i) radius = std::max(radius, std::abs(c[i]) / lead);
  radius = 1.0 + radius;

  std::vector<cplx> z(deg);
  for (int i = 0; i < deg; ++i) {
    double ang = 2.0 * M_PI * (i + 0.25) / deg + 0.42;  // fixed asymmetric offset
    double r = radius * (0.6 + 0.4 * (i % 3) / 3.0);
    z[i] = cplx(r * std::cos(ang), r * std::sin(ang));
  }

  std::vector<cplx> w(deg);
  double step_tol = 1e-14 * std::max(1.0, radius);
  bool accepted = false;
  for (int iter = 0; iter < opts.max_iterations && !accepted; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < deg; ++i) {
      auto ev = horner_with_bound(c, z[i]);
      if (std::abs(ev.p) <= 1e-16 * std::max(ev.bound, 1e-300)) {
        w[i] = 0.0;
        continue;
      }
      cplx ratio;
      if (std::abs(ev.dp) == 0.0) {
        ratio = 1e-8 * std::max(1.0, std::abs(z[i]));  // nudge off a critical point
      } else {
        ratio = ev.p / ev.dp;
      }
      cplx sum = 0.0;
      for (int j = 0; j < deg; ++j) {
        if (j == i) continue;
        cplx d = z[i] - z[j];
        if (std::abs(d) < 1e-300) d = cplx(1e-300, 0.0);
        sum += 1.0 / d;
      }
      cplx denom = 1.0 - ratio * sum;
      cplx corr = (std::abs(denom) < 1e-300) ? ratio : ratio / denom;
      w[i] = corr;
      max_step = std::max(max_step, std::abs(corr));
    }
    for (int i = 0; i < deg; ++i) z[i] -= w[i];
    if (max_step < step_tol) accepted = true;
  }

  // residual acceptance
  for (int i = 0; i < deg; ++i) {
    auto ev = horner_with_bound(c, z[i]);
    if (std::abs(ev.p) > opts.residual_factor * std::max(ev.bound, 1e-300)) {
      throw Error(ErrorCode::RootFindingDiverged,
                  "residual check failed at root index " + std::to_string(i));
    }
  }
  zeros.insert(zeros.end(), z.begin(), z.end());
  return zeros;
}

namespace {

// Derivative tower cache for multiplicity verification.
struct DerivTower {
  std::vector<std::vector<cplx>> d;  // d[j] = coefficients of p^(j)
  explicit DerivTower(const std::vector<cplx>& coeffs) { d.push_back(coeffs); }
  const std::vector<cplx>& order(int j) {
    while (static_cast<int>(d.size()) <= j) d.push_back(differentiate(d.back()));
    return d[static_cast<std::size_t>(j)];
  }
};

double magnitude_bound(const std::vector<cplx>& c, cplx z) {
  double bound = 0.0;
  double az = std::abs(z);
  for (std::size_t i = c.size(); i-- > 0;) bound = bound * az + std::abs(c[i]);
  return bound;
}

cplx polish(const std::vector<cplx>& f, const std::vector<cplx>& df, cplx z0, double guard) {
  cplx z = z0;
  for (int it = 0; it < 50; ++it) {
    cplx fv = horner(f, z);
    cplx dv = horner(df, z);
    if (std::abs(dv) == 0.0) break;
    cplx step = fv / dv;
    if (std::abs(step) > guard) break;  // refuse to wander to a different zero
    z -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return (std::abs(z - z0) <= guard) ? z : z0;
}

// A cluster of size m is accepted when the polished center annihilates the
// derivatives below order m. The yardstick is the coefficient magnitude
// bound at the data scale: the local bound collapses near the origin and
// would make the test unpassable there.
bool verify_multiplicity(DerivTower& tower, cplx center, int m, double scale) {
  double radius = std::max(scale, std::abs(center));
  for (int j = 0; j < m; ++j) {
    const auto& cj = tower.order(j);
    double bound = magnitude_bound(cj, cplx(radius, 0.0));
    if (std::abs(horner(cj, center)) > 1e-9 * std::max(bound, 1e-300)) return false;
  }
  return true;
}

void cluster_level(const std::vector<cplx>& pts, DerivTower& tower, double tol, double scale,
                   std::vector<ClusteredRoot>& out) {
  const std::size_t n = pts.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(pts[i] - pts[j]) < tol) parent[find(static_cast<int>(j))] = find(static_cast<int>(i));

  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    int rep = find(static_cast<int>(i));
    if (seen[rep]) continue;
    seen[rep] = true;
    std::vector<cplx> group;
    for (std::size_t j = 0; j < n; ++j)
      if (find(static_cast<int>(j)) == rep) group.push_back(pts[j]);

    int m = static_cast<int>(group.size());
    cplx mean = 0.0;
    for (const auto& g : group) mean += g;
    mean /= static_cast<double>(m);

    if (m == 1) {
      cplx z = polish(tower.order(0), tower.order(1), mean, 10.0 * tol + 1e-12 * scale);
      out.push_back({z, 1});
      continue;
    }
    // multiplicity-m zero of p is a simple zero of p^(m-1)
    cplx center = polish(tower.order(m - 1), tower.order(m), mean, 2.0 * tol);
    if (verify_multiplicity(tower, center, m, scale)) {
      out.push_back({center, m});
    } else if (tol > 1e-8 * scale) {
      cluster_level(group, tower, tol / 10.0, scale, out);
    } else {
      for (const auto& g : group) out.push_back({polish(tower.order(0), tower.order(1), g, tol), 1});
    }
  }
}

}  // namespace

std::vector<ClusteredRoot> cluster_roots(const std::vector<cplx>& roots,
                                         const std::vector<cplx>& coeffs,
                                         const SolveOptions& opts) {
  if (roots.empty()) return {};
  double scale = 1.0;
  for (const auto& r : roots) scale = std::max(scale, std::abs(r));

  // start coarse: residual-limited accuracy of an m-fold zero scales like
  // residual^(1/m), so genuine multiples can be spread out to ~1e-3
  double tol0 = std::max(opts.cluster_tol, 2e-3) * scale;
  DerivTower tower(coeffs);
  std::vector<ClusteredRoot> out;
  cluster_level(roots, tower, tol0, scale, out);
  std::sort(out.begin(), out.end(), [](const ClusteredRoot& a, const ClusteredRoot& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return out;
}

std::vector<ClusteredRoot> solve_polynomial(const std::vector<cplx>& coeffs,
                                            const SolveOptions& opts) {
  return cluster_roots(aberth_roots(coeffs, opts), coeffs, opts);
}

}  // namespace newton
