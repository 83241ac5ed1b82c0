#include "newton/newton_map.hpp"

#include <algorithm>
#include <cmath>

#include "newton/errors.hpp"

namespace newton {

NewtonMap::NewtonMap(PolynomialSpec spec, double merge_tol)
    : spec_(std::move(spec)), merge_tol_(merge_tol) {
  spec_.validate(merge_tol_);
  denom_ = reduced_denominator(spec_);
  prod_distinct_ = distinct_product(spec_);

  int n = spec_.total_degree();
  for (const auto& r : spec_.roots) {
    FixedPointRecord rec;
    rec.location = SpherePoint(r.location);
    rec.multiplier = cplx((r.multiplicity - 1.0) / r.multiplicity, 0.0);
    rec.kind = (r.multiplicity == 1) ? FixedPointKind::Superattracting
                                     : FixedPointKind::Attracting;
    rec.root_multiplicity = r.multiplicity;
    fixed_points_.push_back(rec);
  }
  FixedPointRecord inf;
  inf.location = SpherePoint::infinity();
  inf.multiplier = cplx(static_cast<double>(n) / (n - 1.0), 0.0);
  inf.kind = FixedPointKind::Repelling;
  fixed_points_.push_back(inf);

  // poles are computed eagerly: the map object is immutable afterwards and
  // safe to share across threads
  SolveOptions opts;
  for (const auto& c : solve_polynomial(denom_, opts)) poles_.push_back({c.location, c.multiplicity});
  poles_ready_ = true;
}

std::pair<int, double> NewtonMap::nearest_root(cplx z) const {
  int best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < spec_.distinct_count(); ++k) {
    double d = std::abs(z - spec_.roots[k].location);
    if (d < dist) {
      dist = d;
      best = k;
    }
  }
  return {best, dist};
}

SpherePoint NewtonMap::eval(const SpherePoint& zp) const {
  if (zp.at_inf) return SpherePoint::infinity();
  cplx z = zp.z;

  auto [k, dist] = nearest_root(z);
  const auto& rk = spec_.roots[k];
  double scale = 1.0 + std::abs(rk.location);

  if (dist < 1e-9 * scale) {
    // removable at the root itself (exactly fixed)
    if (dist == 0.0) return SpherePoint(rk.location);
    // f = a + delta (1 - 1/(n + delta R)) with R the tail log-derivative
    cplx delta = z - rk.location;
    cplx R = 0.0;
    for (int j = 0; j < spec_.distinct_count(); ++j) {
      if (j == k) continue;
      R += static_cast<double>(spec_.roots[j].multiplicity) / (z - spec_.roots[j].location);
    }
    cplx denom = static_cast<double>(rk.multiplicity) + delta * R;
    return SpherePoint(rk.location + delta * (1.0 - 1.0 / denom));
  }

  cplx S = 0.0;
  double max_term = 0.0;
  for (const auto& r : spec_.roots) {
    cplx term = static_cast<double>(r.multiplicity) / (z - r.location);
    S += term;
    max_term = std::max(max_term, std::abs(term));
  }
  if (std::abs(S) >= 1e-3 * max_term) return clamp_to_sphere(z - 1.0 / S);

  // near a zero of p'/p the term sum cancels catastrophically; switch to the
  // reduced rational form f = z - prod(z - a_k) / T(z)
  for (const auto& p : poles_) {
    if (std::abs(z - p.location) < 1e-9 * (1.0 + std::abs(p.location)))
      return SpherePoint::infinity();
  }
  cplx T = horner(denom_, z);
  double tbound = 0.0;
  double az = std::abs(z);
  for (std::size_t i = denom_.size(); i-- > 0;) tbound = tbound * az + std::abs(denom_[i]);
  if (std::abs(T) < 1e-12 * std::max(tbound, 1e-300)) return SpherePoint::infinity();
  cplx prod = 1.0;
  for (const auto& r : spec_.roots) prod *= (z - r.location);
  return clamp_to_sphere(z - prod / T);
}

cplx NewtonMap::derivative(cplx z) const {
  auto [k, dist] = nearest_root(z);
  const auto& rk = spec_.roots[k];
  double scale = 1.0 + std::abs(rk.location);
  if (dist < 1e-6 * scale) {
    // f' = 1 + (-n + R' d^2)/(n^2 + 2 n R d + R^2 d^2), d = z - a_k
    cplx d = z - rk.location;
    cplx R = 0.0, Rp = 0.0;
    for (int j = 0; j < spec_.distinct_count(); ++j) {
      if (j == k) continue;
      cplx inv = 1.0 / (z - spec_.roots[j].location);
      R += static_cast<double>(spec_.roots[j].multiplicity) * inv;
      Rp -= static_cast<double>(spec_.roots[j].multiplicity) * inv * inv;
    }
    cplx n(static_cast<double>(rk.multiplicity), 0.0);
    return 1.0 + (-n + Rp * d * d) / (n * n + 2.0 * n * R * d + R * R * d * d);
  }
  cplx S = 0.0, Sp = 0.0;
  double max_term = 0.0;
  for (const auto& r : spec_.roots) {
    cplx inv = 1.0 / (z - r.location);
    S += static_cast<double>(r.multiplicity) * inv;
    Sp -= static_cast<double>(r.multiplicity) * inv * inv;
    max_term = std::max(max_term, r.multiplicity * std::abs(inv));
  }
  if (std::abs(S) >= 1e-3 * max_term) return 1.0 + Sp / (S * S);

  // cancellation near a pole: f' = 1 - (P' T - P T') / T^2 in the reduced
  // form, with P the distinct-root product
  cplx T = horner(denom_, z);
  cplx Tp = 0.0;
  for (std::size_t i = denom_.size(); i-- > 1;)
    Tp = Tp * z + static_cast<double>(i) * denom_[i];
  cplx prod = 1.0;
  cplx sum1 = 0.0;
  for (const auto& r : spec_.roots) {
    prod *= (z - r.location);
    sum1 += 1.0 / (z - r.location);
  }
  cplx prod_p = prod * sum1;
  return 1.0 - (prod_p * T - prod * Tp) / (T * T);
}

const std::vector<PoleRecord>& NewtonMap::poles() const { return poles_; }

namespace {
// synthetic division by (z - a); the divisor is an exact factor
std::vector<cplx> deflate_linear(const std::vector<cplx>& c, cplx a) {
  std::vector<cplx> q(c.size() - 1);
  cplx carry = c.back();
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    q[i] = carry;
    carry = c[i] + carry * a;
  }
  return q;
}
}  // namespace

const std::vector<CriticalPoint>& NewtonMap::critical_points() const {
  if (!criticals_ready_) {
    auto pcoeffs = expand_coefficients(spec_);
    auto ddp = differentiate(differentiate(pcoeffs));

    // p'' vanishes to known orders at multiple roots (n_k - 2) and at
    // multiple poles (order - 1); deflate those exact factors so the solver
    // only sees the free zeros
    for (const auto& r : spec_.roots)
      for (int i = 0; i < r.multiplicity - 2; ++i) ddp = deflate_linear(ddp, r.location);
    for (const auto& p : poles())
      for (int i = 0; i < p.order - 1; ++i) ddp = deflate_linear(ddp, p.location);

    SolveOptions opts;
    auto free_zeros = solve_polynomial(ddp, opts);

    double scale = 1.0;
    for (const auto& r : spec_.roots) scale = std::max(scale, std::abs(r.location));
    double tol = std::max(merge_tol_, 1e-6) * scale;

    criticals_.clear();
    // roots of p: order of f' there is n_k + ord(p'') - 2(n_k - 1)
    for (const auto& r : spec_.roots) {
      int ord_ddp = std::max(0, r.multiplicity - 2);
      for (const auto& c : free_zeros)
        if (std::abs(c.location - r.location) < tol) ord_ddp += c.multiplicity;
      int ord_fprime = r.multiplicity + ord_ddp - 2 * (r.multiplicity - 1);
      if (ord_fprime > 0)
        criticals_.push_back({SpherePoint(r.location), ord_fprime + 1});
    }
    // multiple poles are critical with local degree equal to the pole order
    for (const auto& p : poles()) {
      if (p.order >= 2) criticals_.push_back({SpherePoint(p.location), p.order});
    }
    // remaining zeros of p'' away from roots and poles
    for (const auto& c : free_zeros) {
      bool near_root = false, near_pole = false;
      for (const auto& r : spec_.roots)
        if (std::abs(c.location - r.location) < tol) near_root = true;
      for (const auto& p : poles())
        if (std::abs(c.location - p.location) < tol) near_pole = true;
      if (!near_root && !near_pole)
        criticals_.push_back({SpherePoint(c.location), c.multiplicity + 1});
    }
    criticals_ready_ = true;
  }
  return criticals_;
}

std::vector<cplx> NewtonMap::fiber_polynomial(cplx w) const {
  // z T(z) - prod(z - a_k) - w T(z), ascending
  std::vector<cplx> out(prod_distinct_.size(), cplx(0.0));
  for (std::size_t i = 0; i < denom_.size(); ++i) {
    out[i + 1] += denom_[i];
    out[i] -= w * denom_[i];
  }
  for (std::size_t i = 0; i < prod_distinct_.size(); ++i) out[i] -= prod_distinct_[i];
  return out;
}

std::vector<ClusteredRoot> NewtonMap::fiber(const SpherePoint& w) const {
  if (w.at_inf) {
    std::vector<ClusteredRoot> out;
    for (const auto& p : poles()) out.push_back({p.location, p.order});
    return out;  // infinity itself is appended by preimages()
  }
  SolveOptions opts;
  return solve_polynomial(fiber_polynomial(w.z), opts);
}

std::vector<SpherePoint> NewtonMap::preimages(const SpherePoint& w) const {
  std::vector<SpherePoint> out;
  if (w.at_inf) {
    for (const auto& p : poles())
      for (int i = 0; i < p.order; ++i) out.push_back(SpherePoint(p.location));
    out.push_back(SpherePoint::infinity());
    return out;
  }
  for (const auto& c : fiber(w))
    for (int i = 0; i < c.multiplicity; ++i) out.push_back(SpherePoint(c.location));
  return out;
}

HeadCheckResult head_check(const std::vector<HeadCandidate>& candidates, double tol) {
  HeadCheckResult res;
  int inf_count = 0;
  std::vector<const HeadCandidate*> finite;
  for (const auto& c : candidates) {
    if (c.location.at_inf)
      ++inf_count;
    else
      finite.push_back(&c);
  }
  if (inf_count != 1) {
    res.reason = "expected exactly one fixed point at infinity, got " +
                 std::to_string(inf_count);
    return res;
  }
  if (finite.size() < 2) {
    res.reason = "need at least two finite fixed points";
    return res;
  }
  for (std::size_t i = 0; i < finite.size(); ++i) {
    for (std::size_t j = i + 1; j < finite.size(); ++j) {
      if (std::abs(finite[i]->location.z - finite[j]->location.z) < tol) {
        res.reason = "fixed point locations are not distinct";
        return res;
      }
    }
  }
  PolynomialSpec spec;
  spec.leading = cplx(1.0, 0.0);
  for (const auto* c : finite) {
    cplx mu = c->multiplier;
    // multiplier must be 1 - 1/n for an integer n >= 1
    if (std::abs(mu - cplx(1.0, 0.0)) < tol) {
      res.reason = "multiplier 1 at a finite fixed point (no integer n)";
      return res;
    }
    cplx n_est = 1.0 / (1.0 - mu);
    long n = std::lround(n_est.real());
    if (n < 1 || std::abs(n_est - cplx(static_cast<double>(n), 0.0)) > tol * 10.0) {
      res.reason = "multiplier " + std::to_string(mu.real()) + "+" +
                   std::to_string(mu.imag()) + "i is not of the form 1-1/n";
      return res;
    }
    res.multiplicities.push_back(static_cast<int>(n));
    spec.roots.push_back({c->location.z, static_cast<int>(n)});
  }
  res.accepted = true;
  res.reconstructed = std::move(spec);
  return res;
}

}  // namespace newton
