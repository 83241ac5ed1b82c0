#include "newton/ray.hpp"

#include <algorithm>
#include <optional>
#include <cmath>

#include "newton/errors.hpp"

namespace newton {

RayTracer::RayTracer(ChartAtlas& atlas, RayOptions opts) : atlas_(&atlas), opts_(opts) {}

double RayTracer::base_log_potential(int comp_id) const {
  const auto& comp = atlas_->component(comp_id);
  if (comp.immediate) {
    const auto& chart = atlas_->chart(comp_id);
    return -comp.degree * std::log(0.9 * chart.seed_abs);
  }
  return base_log_potential(comp.image) / comp.degree;
}

namespace {

// adaptive single-target continuation wrapper around ChartAtlas::point_at
cplx point_at_adaptive(const ChartAtlas& atlas, int comp, cplx w_from, cplx w_to, cplx hint) {
  double lo = 0.0, step = 1.0;
  cplx z = hint;
  int guard = 0;
  while (lo < 1.0) {
    double hi = std::min(1.0, lo + step);
    cplx w = w_from + (w_to - w_from) * hi;
    try {
      z = atlas.point_at(comp, w, z);
      lo = hi;
      step = std::min(1.0, step * 2.0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BranchJump) throw;
      step *= 0.5;
      if (++guard > 60)
        throw Error(ErrorCode::ContinuationStalled, "ray continuation underflow");
    }
  }
  return z;
}

}  // namespace

void RayTracer::trace_immediate_cycle(int comp_id, const std::vector<Angle>& cycle) {
  const auto& comp = atlas_->component(comp_id);
  const auto& chart = atlas_->chart(comp_id);
  const int m = comp.degree;
  const int K0 = opts_.steps_per_level;
  const double L0 = base_log_potential(comp_id);
  const double ratio = std::pow(static_cast<double>(m), -1.0 / K0);

  const std::size_t P = cycle.size();
  std::vector<InternalRay> rays(P);
  for (std::size_t i = 0; i < P; ++i) {
    rays[i].component = comp_id;
    rays[i].angle = cycle[i];
    rays[i].angle_preperiod = 0;
    rays[i].angle_period = static_cast<int>(P);
  }
  // successor index within the cycle under angle multiplication
  std::vector<std::size_t> succ(P);
  for (std::size_t i = 0; i < P; ++i) {
    Angle img = cycle[i].times(m);
    auto it = std::find(cycle.begin(), cycle.end(), img);
    if (it == cycle.end())
      throw Error(ErrorCode::InvalidArgument, "angle cycle is not closed");
    succ[i] = static_cast<std::size_t>(it - cycle.begin());
  }

  int k_max = static_cast<int>(std::ceil(K0 * std::log(L0 / opts_.deep_limit) /
                                         std::log(static_cast<double>(m))));
  for (int k = 0; k <= k_max; ++k) {
    double L = L0 * std::pow(ratio, k);
    double t = std::exp(-L);
    for (std::size_t i = 0; i < P; ++i) {
      cplx w = std::polar(t, 2.0 * M_PI * cycle[i].value());
      cplx z;
      if (k < K0) {
        if (t > chart.seed_abs)
          throw Error(ErrorCode::InvalidArgument, "series seed zone too small for the grid");
        z = atlas_->point_at(comp_id, w, chart.center);
      } else {
        const cplx y = rays[succ[i]].samples[static_cast<std::size_t>(k - K0)].point;
        const cplx hint = rays[i].samples.back().point;
        try {
          z = atlas_->pull_once(y, hint);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::BranchJump && e.code() != ErrorCode::ContinuationStalled)
            throw;
          cplx w_prev = std::polar(std::exp(-L / ratio), 2.0 * M_PI * cycle[i].value());
          z = point_at_adaptive(*atlas_, comp_id, w_prev, w, hint);
        }
      }
      rays[i].samples.push_back({L, z});
    }
  }
  for (std::size_t i = 0; i < P; ++i) {
    finish_landing(rays[i]);
    cache_[key(comp_id, cycle[i])] = std::move(rays[i]);
  }
}

void RayTracer::trace_lifted(int comp_id, Angle theta) {
  const auto& comp = atlas_->component(comp_id);
  const int m = comp.degree;
  const int K0 = opts_.steps_per_level;

  // image ray must exist: same component for immediate ones, the image
  // component otherwise
  int img_comp = comp.immediate ? comp_id : comp.image;
  Angle img_angle = theta.times(m);
  const InternalRay& img = ray(img_comp, img_angle);

  InternalRay out;
  out.component = comp_id;
  out.angle = theta;
  out.angle_preperiod = img.angle_preperiod + 1;
  out.angle_period = img.angle_period;

  if (comp.immediate) {
    const auto& chart = atlas_->chart(comp_id);
    const double L0 = base_log_potential(comp_id);
    const double ratio = std::pow(static_cast<double>(m), -1.0 / K0);
    int k_max = static_cast<int>(std::ceil(K0 * std::log(L0 / opts_.deep_limit) /
                                           std::log(static_cast<double>(m))));
    for (int k = 0; k <= k_max; ++k) {
      double L = L0 * std::pow(ratio, k);
      double t = std::exp(-L);
      cplx w = std::polar(t, 2.0 * M_PI * theta.value());
      cplx z;
      if (k < K0) {
        if (t > chart.seed_abs)
          throw Error(ErrorCode::InvalidArgument, "series seed zone too small for the grid");
        z = atlas_->point_at(comp_id, w, chart.center);
      } else {
        std::size_t img_idx = static_cast<std::size_t>(k - K0);
        if (img_idx >= img.samples.size()) break;
        const cplx y = img.samples[img_idx].point;
        const cplx hint = out.samples.back().point;
        try {
          z = atlas_->pull_once(y, hint);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::BranchJump && e.code() != ErrorCode::ContinuationStalled)
            throw;
          cplx w_prev = std::polar(std::exp(-L / ratio), 2.0 * M_PI * theta.value());
          z = point_at_adaptive(*atlas_, comp_id, w_prev, w, hint);
        }
      }
      out.samples.push_back({L, z});
    }
  } else {
    // lift every image sample through one branch of f
    cplx hint = comp.center;
    for (std::size_t k = 0; k < img.samples.size(); ++k) {
      const cplx y = img.samples[k].point;
      cplx z;
      try {
        z = atlas_->pull_once(y, hint);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BranchJump && e.code() != ErrorCode::ContinuationStalled)
          throw;
        double L = img.samples[k].log_potential / m;
        double L_prev = k > 0 ? img.samples[k - 1].log_potential / m : L * 1.5;
        cplx w = std::polar(std::exp(-L), 2.0 * M_PI * theta.value());
        cplx w_prev = std::polar(std::exp(-L_prev), 2.0 * M_PI * theta.value());
        z = point_at_adaptive(*atlas_, comp_id, w_prev, w, hint);
      }
      out.samples.push_back({img.samples[k].log_potential / m, z});
      hint = z;
    }
  }
  finish_landing(out);
  cache_[key(comp_id, theta)] = std::move(out);
}

const std::vector<SpherePoint>& RayTracer::prepoles_to_depth(int depth) {
  depth = std::min(depth, 8);
  while (static_cast<int>(prepole_levels_.size()) <= depth) {
    if (prepole_levels_.empty()) {
      prepole_levels_.push_back({SpherePoint::infinity()});
    } else {
      std::vector<SpherePoint> next = prepole_levels_.back();
      for (const auto& target : prepole_levels_.back()) {
        if (target.at_inf) {
          for (const auto& p : atlas_->map().poles())
            next.push_back(SpherePoint(p.location));
          continue;
        }
        for (const auto& f : atlas_->map().fiber(target))
          next.push_back(SpherePoint(f.location));
      }
      // dedupe
      std::vector<SpherePoint> dedup;
      for (const auto& p : next) {
        bool seen = false;
        for (const auto& q : dedup)
          if (chordal(p, q) < 1e-9) seen = true;
        if (!seen) dedup.push_back(p);
      }
      prepole_levels_.push_back(std::move(dedup));
    }
  }
  return prepole_levels_[static_cast<std::size_t>(depth)];
}

void RayTracer::finish_landing(InternalRay& r) {
  const int K0 = opts_.steps_per_level;
  if (r.samples.size() < static_cast<std::size_t>(3 * K0 + 1)) {
    r.landed = false;
    return;
  }
  // level-strided tail points, extrapolated as a geometric sequence in the
  // sphere embedding
  std::size_t n = r.samples.size();
  Vec3 p0 = embed(clamp_to_sphere(r.samples[n - 1 - 2 * K0].point));
  Vec3 p1 = embed(clamp_to_sphere(r.samples[n - 1 - K0].point));
  Vec3 p2 = embed(clamp_to_sphere(r.samples[n - 1].point));
  double dx1 = p1.x - p0.x, dy1 = p1.y - p0.y, dz1 = p1.z - p0.z;
  double dx2 = p2.x - p1.x, dy2 = p2.y - p1.y, dz2 = p2.z - p1.z;
  double denom = dx1 * dx1 + dy1 * dy1 + dz1 * dz1;
  double rho = denom > 0 ? (dx1 * dx2 + dy1 * dy2 + dz1 * dz2) / denom : 0.0;
  rho = std::clamp(rho, -0.95, 0.95);
  double gain = rho / (1.0 - rho);
  Vec3 limit{p2.x + dx2 * gain, p2.y + dy2 * gain, p2.z + dz2 * gain};

  double remaining = std::sqrt(dx2 * dx2 + dy2 * dy2 + dz2 * dz2) * std::abs(gain);
  r.tail_diameter = chordal_from_embedded(p1, p2);

  double north = 1.0 - limit.z;
  SpherePoint estimate = (std::abs(north) < 1e-9)
                             ? SpherePoint::infinity()
                             : SpherePoint(cplx(limit.x / north, limit.y / north));
  r.landing = estimate;
  r.landed = (remaining + 0.25 * r.tail_diameter) < opts_.landing_tol;
  r.landing_method = "tail";
  if (r.landed && remaining < 1e-9) return;  // already machine-accurate

  const NewtonMap& f = atlas_->map();
  int q = r.angle_preperiod;
  int P = r.angle_period + atlas_->component(r.component).depth;

  // does the orbit of the estimate reach infinity within the preperiod?
  bool hits_infinity = chordal(estimate, SpherePoint::infinity()) < opts_.snap_tol;
  int total_depth = q + atlas_->component(r.component).depth;
  if (!hits_infinity && estimate.finite()) {
    SpherePoint p = estimate;
    for (int j = 0; j < total_depth && !hits_infinity; ++j) {
      p = f.eval(p);
      if (p.at_inf || chordal(p, SpherePoint::infinity()) < 1e-3) hits_infinity = true;
    }
  }

  if (hits_infinity) {
    // snap to the exact iterated preimages of infinity
    const auto& candidates = prepoles_to_depth(total_depth);
    double best = 1e300, second = 1e300;
    SpherePoint best_pt;
    for (const auto& cand : candidates) {
      double d = chordal(estimate, cand);
      if (d < best) {
        second = best;
        best = d;
        best_pt = cand;
      } else if (d < second) {
        second = d;
      }
    }
    if (best < opts_.snap_tol && best * 5.0 < second) {
      r.landing = best_pt;
      r.landed = true;
      r.landing_method = "snap";
      return;
    }
    return;  // keep the tail verdict
  }

  // Newton polish on the preperiodic equation f^(q+P)(z) = f^q(z)
  if (!estimate.finite()) return;
  cplx z = estimate.z;
  auto orbit_with_derivative = [&](cplx z0, int steps, cplx* deriv) -> std::optional<cplx> {
    cplx d = 1.0;
    SpherePoint p(z0);
    for (int j = 0; j < steps; ++j) {
      if (!p.finite() || std::abs(p.z) > 1e3) return std::nullopt;
      d *= f.derivative(p.z);
      p = f.eval(p);
    }
    if (!p.finite() || std::abs(p.z) > 1e6) return std::nullopt;
    *deriv = d;
    return p.z;
  };
  bool ok = false;
  for (int it = 0; it < 30; ++it) {
    cplx d_long, d_short;
    auto lng = orbit_with_derivative(z, q + P, &d_long);
    auto shrt = orbit_with_derivative(z, q, &d_short);
    if (!lng || !shrt) break;
    cplx g = *lng - *shrt;
    cplx dg = d_long - d_short;
    if (std::abs(dg) < 1e-14) break;
    cplx step = g / dg;
    z -= step;
    if (std::abs(z - estimate.z) > 5e-3 * (1.0 + std::abs(estimate.z))) break;  // wandered
    if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) {
      ok = true;
      break;
    }
  }
  if (ok) {
    r.landing = SpherePoint(z);
    r.landed = true;
    r.landing_method = "polish";
  }
}

const InternalRay& RayTracer::ray(int comp_id, Angle theta) {
  auto it = cache_.find(key(comp_id, theta));
  if (it != cache_.end()) return it->second;

  const auto& comp = atlas_->component(comp_id);
  if (!comp.immediate) {
    trace_lifted(comp_id, theta);
    return cache_.at(key(comp_id, theta));
  }

  // angle orbit under multiplication by the degree: find the cycle
  const int m = comp.degree;
  std::vector<Angle> orbit{theta};
  std::size_t cycle_start = 0;
  for (;;) {
    Angle next = orbit.back().times(m);
    auto pos = std::find(orbit.begin(), orbit.end(), next);
    if (pos != orbit.end()) {
      cycle_start = static_cast<std::size_t>(pos - orbit.begin());
      break;
    }
    orbit.push_back(next);
    if (orbit.size() > 4096)
      throw Error(ErrorCode::InvalidArgument, "angle orbit too long");
  }
  std::vector<Angle> cycle(orbit.begin() + cycle_start, orbit.end());
  bool cycle_cached = cache_.count(key(comp_id, cycle[0])) > 0;
  if (!cycle_cached) trace_immediate_cycle(comp_id, cycle);

  // lift the pre-periodic tail back toward theta
  for (std::size_t i = cycle_start; i-- > 0;) {
    if (!cache_.count(key(comp_id, orbit[i]))) trace_lifted(comp_id, orbit[i]);
  }
  return cache_.at(key(comp_id, theta));
}

SpherePoint RayTracer::land(int comp_id, Angle theta) {
  const InternalRay& r = ray(comp_id, theta);
  if (!r.landed)
    throw Error(ErrorCode::NotConverged,
                "ray tail did not certify (diameter " + std::to_string(r.tail_diameter) + ")");
  return r.landing;
}

cplx RayTracer::ray_point(int comp_id, Angle theta, double L) {
  const InternalRay& r = ray(comp_id, theta);
  // nearest traced sample as the continuation hint
  std::size_t best = 0;
  double bestd = 1e300;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    double d = std::abs(std::log(r.samples[i].log_potential / L));
    if (d < bestd) {
      bestd = d;
      best = i;
    }
  }
  cplx w_from = std::polar(std::exp(-r.samples[best].log_potential),
                           2.0 * M_PI * theta.value());
  cplx w_to = std::polar(std::exp(-L), 2.0 * M_PI * theta.value());
  return point_at_adaptive(*atlas_, comp_id, w_from, w_to, r.samples[best].point);
}

bool RayTracer::sector_contains(const Sector& s, cplx z) const {
  cplx w = atlas_->coord(s.component, z);
  if (std::abs(w) <= s.min_potential) return false;
  double ang = std::arg(w) / (2.0 * M_PI);
  ang -= std::floor(ang);
  double lo = s.from.value(), span = ccw_span(s.from, s.to);
  double rel = ang - lo;
  rel -= std::floor(rel);
  return rel < span;
}

}  // namespace newton
