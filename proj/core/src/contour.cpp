#include "newton/contour.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "newton/errors.hpp"

namespace newton {

namespace {

constexpr double kPhaseLimit = 0.2;       // max allowed phase step, radians
constexpr double kResidualLimit = 0.1;
constexpr int kMaxRefineDepth = 24;

double point_segment_distance(cplx z, cplx a, cplx b) {
  cplx ab = b - a;
  double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  double t = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

bool segments_cross(cplx a, cplx b, cplx c, cplx d) {
  auto orient = [](cplx p, cplx q, cplx r) {
    double v = ((q - p) * std::conj(r - p)).imag();
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

double polyline_signed_area(const std::vector<cplx>& pts) {
  double area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const cplx& p = pts[i];
    const cplx& q = pts[(i + 1) % pts.size()];
    area += p.real() * q.imag() - q.real() * p.imag();
  }
  return 0.5 * area;
}

// Adaptive traversal: w(z) is evaluated along the (sub-divided) polyline and
// the argument increments are accumulated exactly; h(z) dz is accumulated by
// trapezoid for the residual certificate.
struct TraversalResult {
  double turns = 0.0;   // total argument change of w / 2 pi
  cplx integral = 0.0;  // trapezoid of h dz / (2 pi i)
};

TraversalResult traverse(const std::vector<cplx>& pts,
                         const std::function<cplx(cplx)>& w,
                         const std::function<cplx(cplx)>& h) {
  TraversalResult out;
  const cplx two_pi_i(0.0, 2.0 * M_PI);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cplx a = pts[i];
    cplx b = pts[(i + 1) % pts.size()];
    // segment stack refined until the phase step is small
    struct Seg { cplx a, b, wa, wb, ha, hb; int depth; };
    std::deque<Seg> stack;
    cplx wa = w(a), wb = w(b);
    stack.push_back({a, b, wa, wb, h(a), h(b), 0});
    while (!stack.empty()) {
      Seg s = stack.front();
      stack.pop_front();
      if (std::abs(s.wa) == 0.0 || std::abs(s.wb) == 0.0)
        throw Error(ErrorCode::PointOnCurve, "zero of the integrand base on the curve");
      double dphase = std::abs(std::arg(s.wb / s.wa));
      if (dphase > kPhaseLimit && s.depth < kMaxRefineDepth) {
        cplx m = 0.5 * (s.a + s.b);
        cplx wm = w(m), hm = h(m);
        stack.push_front({m, s.b, wm, s.wb, hm, s.hb, s.depth + 1});
        stack.push_front({s.a, m, s.wa, wm, s.ha, hm, s.depth + 1});
        continue;
      }
      out.turns += std::arg(s.wb / s.wa) / (2.0 * M_PI);
      out.integral += 0.5 * (s.ha + s.hb) * (s.b - s.a) / two_pi_i;
    }
  }
  return out;
}

}  // namespace

SampledCurve SampledCurve::circle(cplx center, double radius, int n, bool interior_bounded) {
  SampledCurve c;
  c.interior_bounded = interior_bounded;
  c.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * M_PI * i / n;
    c.points.push_back(center + radius * cplx(std::cos(t), std::sin(t)));
  }
  return c;
}

void SampledCurve::validate() const {
  if (points.size() < 64)
    throw Error(ErrorCode::InvalidArgument, "sampled curve needs at least 64 points");
  for (const auto& p : points)
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
      throw Error(ErrorCode::InvalidArgument, "curve samples must be finite");
  std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // skip adjacent segments (they share an endpoint)
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_cross(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]))
        throw Error(ErrorCode::RealizationNotSimple, "curve self-intersects");
    }
  }
}

double SampledCurve::distance_to(cplx z) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    best = std::min(best, point_segment_distance(z, points[i], points[(i + 1) % points.size()]));
  return best;
}

int SampledCurve::encloses(cplx z, double tol) const {
  if (distance_to(z) < tol * (1.0 + std::abs(z)))
    throw Error(ErrorCode::PointOnCurve, "query point lies on the curve");
  double turns = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    cplx a = points[i] - z;
    cplx b = points[(i + 1) % points.size()] - z;
    turns += std::arg(b / a);
  }
  return std::lround(std::abs(turns) / (2.0 * M_PI)) != 0 ? 1 : 0;
}

bool SampledCurve::in_designated_interior(cplx z, double tol) const {
  bool enclosed = encloses(z, tol) != 0;
  return interior_bounded ? enclosed : !enclosed;
}

IterateView::IterateView(const NewtonMap& map, int k) : map_(&map), k_(k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "iterate power must be >= 1");
  // poles of f^k: points reaching infinity within k steps, with local orders
  poles_.clear();
  for (const auto& p : map.poles()) poles_.push_back(p);
  std::vector<PoleRecord> frontier = poles_;
  for (int depth = 1; depth < k; ++depth) {
    std::vector<PoleRecord> next;
    for (const auto& target : frontier) {
      for (const auto& pre : map.fiber(SpherePoint(target.location))) {
        // skip preimages that are already (pre)poles closer to infinity
        next.push_back({pre.location, pre.multiplicity * target.order});
      }
    }
    for (const auto& rec : next) {
      bool known = false;
      for (auto& existing : poles_)
        if (std::abs(existing.location - rec.location) < 1e-8) known = true;
      if (!known) poles_.push_back(rec);
    }
    frontier = next;
  }
}

cplx IterateView::eval(cplx z) const {
  SpherePoint p(z);
  for (int i = 0; i < k_; ++i) {
    p = map_->eval(p);
    if (p.at_inf)
      throw Error(ErrorCode::PointOnCurve, "orbit hit infinity during contour evaluation");
  }
  return p.z;
}

cplx IterateView::derivative(cplx z) const {
  cplx acc = 1.0;
  SpherePoint p(z);
  for (int i = 0; i < k_; ++i) {
    acc *= map_->derivative(p.z);
    p = map_->eval(p);
    if (p.at_inf)
      throw Error(ErrorCode::PointOnCurve, "orbit hit infinity during contour evaluation");
  }
  return acc;
}

int winding_number(const SampledCurve& curve, cplx z0, double tol) {
  if (curve.distance_to(z0) < tol * (1.0 + std::abs(z0)))
    throw Error(ErrorCode::PointOnCurve, "basepoint on curve");
  double turns = 0.0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    cplx a = curve.points[i] - z0;
    cplx b = curve.points[(i + 1) % curve.points.size()] - z0;
    turns += std::arg(b / a) / (2.0 * M_PI);
  }
  long value = std::lround(turns);
  double residual = std::abs(turns - static_cast<double>(value));
  if (residual > kResidualLimit)
    throw Error(ErrorCode::ResidualTooLarge, "winding residual " + std::to_string(residual));
  return static_cast<int>(value);
}

namespace {

// Shared core: value = s * turns + enclosed pole orders + unbounded
// correction, where s flips when the designated interior is the unbounded
// side (region boundary orientation).
CountResult counted_traversal(const SampledCurve& curve,
                              const std::function<cplx(cplx)>& w,
                              const std::function<cplx(cplx)>& h,
                              const std::vector<PoleRecord>& poles,
                              int infinity_pole_order) {
  curve.validate();
  auto tr = traverse(curve.points, w, h);
  double ccw = polyline_signed_area(curve.points) >= 0.0 ? 1.0 : -1.0;
  double s = curve.interior_bounded ? ccw : -ccw;  // region on the left

  double corrected = s * tr.turns;
  int pole_orders = 0;
  for (const auto& p : poles)
    if (curve.in_designated_interior(p.location)) pole_orders += p.order;
  if (!curve.interior_bounded) pole_orders += infinity_pole_order;

  double raw = corrected + pole_orders;
  long value = std::lround(raw);
  // residual certificate from the trapezoid route
  double quad = s * tr.integral.real() + pole_orders;
  double residual = std::max(std::abs(raw - value), std::abs(quad - value));
  if (residual > kResidualLimit)
    throw Error(ErrorCode::ResidualTooLarge, "contour residual " + std::to_string(residual));
  return {static_cast<int>(value), residual};
}

}  // namespace

CountResult count_fixed_points(const IterateView& g, const SampledCurve& curve) {
  // no fixed point of g may sit on the curve (chordal 1e-6)
  for (const auto& fp : g.base().fixed_points()) {
    if (fp.location.at_inf) continue;
    double dist = curve.distance_to(fp.location.z);
    double chord = 2.0 * dist / (1.0 + std::norm(fp.location.z));
    if (chord < 1e-6)
      throw Error(ErrorCode::FixedPointOnCurve, "fixed point within tolerance of curve");
  }
  auto w = [&](cplx z) { return g.eval(z) - z; };
  auto h = [&](cplx z) {
    cplx denom = g.eval(z) - z;
    return (g.derivative(z) - 1.0) / denom;
  };
  // g - z has a simple pole at infinity for every Newton-map iterate
  return counted_traversal(curve, w, h, g.poles(), 1);
}

CountResult boundary_degree(const IterateView& g, const SampledCurve& curve, cplx basepoint) {
  auto w = [&](cplx z) { return g.eval(z) - basepoint; };
  auto h = [&](cplx z) { return g.derivative(z) / (g.eval(z) - basepoint); };
  return counted_traversal(curve, w, h, g.poles(), 1);
}

CountResult count_zeros_dp(const NewtonMap& map, const SampledCurve& curve) {
  const auto& spec = map.spec();
  auto w = [&](cplx z) { return eval_dp(spec, z); };
  auto h = [&](cplx z) {
    auto ev = eval_all(spec, z);
    if (std::abs(ev.dp) == 0.0)
      throw Error(ErrorCode::ZeroOnCurve, "zero of p' on curve");
    return ev.ddp / ev.dp;
  };
  // p' is a polynomial of degree n-1: pole of that order at infinity
  return counted_traversal(curve, w, h, {}, spec.total_degree() - 1);
}

CountResult pole_count_in(const NewtonMap& map, const SampledCurve& curve) {
  CountResult raw = count_zeros_dp(map, curve);
  int removable = 0;
  for (const auto& r : map.spec().roots) {
    if (r.multiplicity >= 2 && curve.in_designated_interior(r.location))
      removable += r.multiplicity - 1;
  }
  return {raw.value - removable, raw.residual};
}

std::vector<LiftedCurve> lift_closed_curve(const NewtonMap& map, const std::vector<cplx>& image,
                                           double step_tol) {
  if (image.size() < 8)
    throw Error(ErrorCode::InvalidArgument, "image polyline too coarse to lift");

  auto solve_near = [&](cplx target, cplx seed) -> cplx {
    cplx z = seed;
    for (int it = 0; it < 60; ++it) {
      SpherePoint fz = map.eval(SpherePoint(z));
      if (fz.at_inf) throw Error(ErrorCode::ContinuationStalled, "lift passed through a pole");
      cplx err = fz.z - target;
      if (std::abs(err) < step_tol * (1.0 + std::abs(target))) return z;
      cplx d = map.derivative(z);
      if (std::abs(d) < 1e-14) throw Error(ErrorCode::ContinuationStalled, "derivative vanished");
      cplx step = err / d;
      // damped to suppress overshoot near critical points
      if (std::abs(step) > 0.5 * (1.0 + std::abs(z))) step *= 0.5 * (1.0 + std::abs(z)) / std::abs(step);
      z -= step;
    }
    throw Error(ErrorCode::ContinuationStalled, "corrector did not converge");
  };

  // start set: the full fiber over image[0]
  auto fiber0 = map.fiber(SpherePoint(image[0]));
  std::vector<cplx> starts;
  for (const auto& c : fiber0)
    for (int i = 0; i < c.multiplicity; ++i) starts.push_back(c.location);

  std::vector<bool> used(starts.size(), false);
  double match_tol = 1e-6;
  for (const auto& s : starts) match_tol = std::max(match_tol, 1e-9 * (1.0 + std::abs(s)));

  std::vector<LiftedCurve> lifts;
  for (std::size_t s0 = 0; s0 < starts.size(); ++s0) {
    if (used[s0]) continue;
    LiftedCurve lift;
    cplx z = starts[s0];
    cplx start = z;
    int loops = 0;
    const int max_loops = map.degree() + 1;
    while (loops < max_loops) {
      for (std::size_t i = 0; i < image.size(); ++i) {
        if (i == 0) {
          // mark the fiber point we pass through
          for (std::size_t k = 0; k < starts.size(); ++k)
            if (!used[k] && std::abs(starts[k] - z) < 1e-5 * (1.0 + std::abs(z))) used[k] = true;
          lift.points.push_back(z);
          continue;
        }
        cplx target = image[i];
        cplx prev = z;
        z = solve_near(target, z);
        if (std::abs(z - prev) > 0.5 * (1.0 + std::abs(prev))) {
          // suspicious jump: refine by inserting parameter midpoints
          cplx mid_target = 0.5 * (image[i - 1] + image[i]);
          cplx zm = solve_near(mid_target, prev);
          z = solve_near(target, zm);
        }
        lift.points.push_back(z);
      }
      z = solve_near(image[0], z);
      ++loops;
      if (std::abs(z - start) < 1e-6 * (1.0 + std::abs(start))) break;
    }
    if (loops >= max_loops)
      throw Error(ErrorCode::ContinuationStalled, "lift failed to close");
    lift.degree = loops;
    lifts.push_back(std::move(lift));
  }
  return lifts;
}

FixDegreeReport verify_fix_eq_degree(const NewtonMap& map, const SampledCurve& D, cplx seed) {
  D.validate();
  SpherePoint fseed = map.eval(SpherePoint(seed));
  if (fseed.at_inf || !D.in_designated_interior(fseed.z))
    throw Error(ErrorCode::ComponentNotInside, "seed does not map into the designated interior");

  auto lifts = lift_closed_curve(map, D.points);

  // nesting address of a point: enclosure bit per lifted curve
  auto address = [&](cplx z) {
    std::vector<int> bits;
    for (const auto& l : lifts) {
      SampledCurve c;
      c.points = l.points;
      bits.push_back(c.encloses(z));
    }
    return bits;
  };
  auto seed_addr = address(seed);

  // boundary curves of the seed's component: lifted curves with the same
  // address as the seed with respect to all OTHER curves
  FixDegreeReport rep;
  std::vector<std::size_t> boundary_ids;
  for (std::size_t i = 0; i < lifts.size(); ++i) {
    cplx probe = lifts[i].points[0];
    bool same = true;
    for (std::size_t j = 0; j < lifts.size() && same; ++j) {
      if (j == i) continue;
      SampledCurve cj;
      cj.points = lifts[j].points;
      if (cj.encloses(probe) != seed_addr[j]) same = false;
    }
    if (same) boundary_ids.push_back(i);
  }
  if (boundary_ids.empty())
    throw Error(ErrorCode::ComponentNotInside, "no boundary component found for the seed");

  // U inside the designated interior of D: boundary samples must not leave it
  for (auto i : boundary_ids) {
    for (std::size_t k = 0; k < lifts[i].points.size(); k += 7) {
      cplx z = lifts[i].points[k];
      if (D.distance_to(z) < 1e-9 * (1.0 + std::abs(z))) continue;  // boundary contact
      if (!D.in_designated_interior(z))
        throw Error(ErrorCode::ComponentNotInside, "preimage component leaves the disk");
    }
  }

  rep.boundary_components = static_cast<int>(boundary_ids.size());
  rep.unbounded = std::all_of(seed_addr.begin(), seed_addr.end(), [](int b) { return b == 0; });

  // --- fixed points in the closure of U (contour route) ---
  double fix_total = 0.0;
  for (auto i : boundary_ids) {
    SampledCurve c;
    c.points = lifts[i].points;
    double ccw = polyline_signed_area(c.points) >= 0.0 ? 1.0 : -1.0;
    bool u_inside = c.encloses(seed) != 0;
    double s = u_inside ? ccw : -ccw;
    auto w = [&](cplx z) {
      SpherePoint f = map.eval(SpherePoint(z));
      if (f.at_inf) throw Error(ErrorCode::PointOnCurve, "pole on traced boundary");
      return f.z - z;
    };
    auto h = [&](cplx z) { return (map.derivative(z) - 1.0) / w(z); };
    auto tr = traverse(c.points, w, h);
    fix_total += s * tr.turns;
  }
  // pole and infinity corrections for the region U
  auto in_U = [&](cplx z) { return address(z) == seed_addr; };
  for (const auto& p : map.poles())
    if (in_U(p.location)) fix_total += p.order;
  // argument-principle correction: f - z has a simple pole at infinity
  if (rep.unbounded) fix_total += 1.0;
  long fix_rounded = std::lround(fix_total);
  if (std::abs(fix_total - fix_rounded) > kResidualLimit)
    throw Error(ErrorCode::ResidualTooLarge, "fixed point count residual");
  rep.fix_count = static_cast<int>(fix_rounded);
  // infinity itself is a simple fixed point of every Newton map and belongs
  // to the closure of an unbounded component
  if (rep.unbounded) rep.fix_count += 1;

  // --- covering degree over the boundary (image winding route) ---
  // reference point on the non-designated side of D
  cplx ref;
  bool found_ref = false;
  cplx centroid = 0.0;
  for (const auto& p : D.points) centroid += p;
  centroid /= static_cast<double>(D.points.size());
  for (double frac : {0.0, 0.3, 0.6}) {
    cplx candidate = centroid + frac * (D.points[0] - centroid);
    try {
      if (D.in_designated_interior(candidate) == false) {
        ref = candidate;
        found_ref = true;
        break;
      }
    } catch (const Error&) {
    }
  }
  if (!found_ref)
    throw Error(ErrorCode::InvalidArgument, "could not find reference point off the interior");

  int degree = 0;
  for (auto i : boundary_ids) {
    double turns = 0.0;
    const auto& pts = lifts[i].points;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      SpherePoint fa = map.eval(SpherePoint(pts[k]));
      SpherePoint fb = map.eval(SpherePoint(pts[(k + 1) % pts.size()]));
      if (fa.at_inf || fb.at_inf)
        throw Error(ErrorCode::PointOnCurve, "image hit infinity during degree computation");
      turns += std::arg((fb.z - ref) / (fa.z - ref)) / (2.0 * M_PI);
    }
    degree += static_cast<int>(std::llabs(std::lround(turns)));
    rep.boundary.push_back(pts);
  }
  rep.degree = degree;
  rep.homeomorphism_case = (rep.fix_count == 1 && rep.degree == 1);
  rep.passed = (rep.fix_count == rep.degree);
  return rep;
}

void check_independent(const std::vector<SampledCurve>& curves) {
  for (const auto& c : curves) c.validate();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      // designated interiors must be disjoint: cross-test witness samples
      int hits = 0;
      int total = 0;
      for (std::size_t k = 0; k < curves[j].points.size(); k += 17) {
        cplx z = curves[j].points[k];
        try {
          if (curves[i].in_designated_interior(z) && curves[j].interior_bounded) ++hits;
        } catch (const Error&) {
        }
        ++total;
      }
      // witness: a point solidly inside each designated interior
      auto witness = [&](const SampledCurve& c) -> cplx {
        for (std::size_t k = 0; k < c.points.size(); ++k) {
          cplx a = c.points[k], b = c.points[(k + 1) % c.points.size()];
          cplx mid = 0.5 * (a + b);
          cplx normal = (b - a) * cplx(0.0, 1.0);
          normal /= std::abs(normal);
          for (double eps : {1e-3, 1e-2, 1e-1}) {
            for (double sign : {1.0, -1.0}) {
              cplx cand = mid + sign * eps * normal;
              try {
                if (c.in_designated_interior(cand)) return cand;
              } catch (const Error&) {
              }
            }
          }
        }
        throw Error(ErrorCode::NotIndependent, "could not find interior witness");
      };
      cplx wi = witness(curves[i]);
      cplx wj = witness(curves[j]);
      bool overlap = false;
      try {
        overlap = curves[i].in_designated_interior(wj) || curves[j].in_designated_interior(wi);
      } catch (const Error&) {
        overlap = true;
      }
      if (overlap || hits > 0)
        throw Error(ErrorCode::NotIndependent,
                    "designated interiors of curves " + std::to_string(i) + " and " +
                        std::to_string(j) + " overlap");
    }
  }
}

CountResult region_pole_count(const NewtonMap& map, const std::vector<SampledCurve>& curves) {
  check_independent(curves);
  // total poles of f (multiplicity = order of the underlying zero of p')
  int total = 0;
  for (const auto& p : map.poles()) total += p.order;

  double residual = 0.0;
  int inside = 0;
  for (const auto& c : curves) {
    CountResult r = pole_count_in(map, c);
    inside += r.value;
    residual = std::max(residual, r.residual);
  }
  return {total - inside, residual};
}

}  // namespace newton
