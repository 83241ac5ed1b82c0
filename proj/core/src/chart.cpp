#include "newton/chart.hpp"

#include <algorithm>
#include <cmath>

#include "newton/errors.hpp"

namespace newton {

namespace {

using Series = std::vector<cplx>;  // ascending, truncated

Series series_mul(const Series& a, const Series& b, std::size_t order) {
  Series out(std::min(order + 1, a.size() + b.size() - 1), cplx(0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) == 0.0) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) {
      if (i + j < out.size()) out[i + j] += a[i] * b[j];
    }
  }
  out.resize(order + 1, cplx(0.0));
  return out;
}

Series series_inverse(const Series& a, std::size_t order) {
  // reciprocal of a series with nonzero constant term
  Series out(order + 1, cplx(0.0));
  out[0] = 1.0 / a[0];
  for (std::size_t k = 1; k <= order; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 1; j <= k && j < a.size(); ++j) acc += a[j] * out[k - j];
    out[k] = -acc / a[0];
  }
  return out;
}

// u(F(zeta)) for F with F(0) = 0, truncated
Series series_compose(const Series& u, const Series& F, std::size_t order) {
  Series out(order + 1, cplx(0.0));
  out[0] = u.empty() ? cplx(0.0) : u[0];
  Series power{cplx(1.0)};
  for (std::size_t j = 1; j < u.size(); ++j) {
    power = series_mul(power, F, order);
    if (std::abs(u[j]) == 0.0) continue;
    for (std::size_t k = 0; k < power.size() && k <= order; ++k) out[k] += u[j] * power[k];
  }
  return out;
}

Series series_pow(const Series& a, int m, std::size_t order) {
  Series out{cplx(1.0)};
  for (int i = 0; i < m; ++i) out = series_mul(out, a, order);
  return out;
}

cplx series_value(const Series& a, cplx z) {
  cplx acc = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) acc = acc * z + a[i];
  return acc;
}

cplx series_derivative_value(const Series& a, cplx z) {
  cplx acc = 0.0;
  for (std::size_t i = a.size(); i-- > 1;) acc = acc * z + static_cast<double>(i) * a[i];
  return acc;
}

// Taylor coefficients of p at the center a from the factored form
Series taylor_of_p(const PolynomialSpec& spec, cplx a, std::size_t order) {
  Series out{spec.leading};
  for (const auto& r : spec.roots) {
    Series lin{a - r.location, cplx(1.0)};
    for (int i = 0; i < r.multiplicity; ++i) out = series_mul(out, lin, order);
  }
  out.resize(order + 1, cplx(0.0));
  return out;
}

cplx nth_root_near(cplx w, int m, cplx hint, double ambiguity_ratio) {
  if (m == 1) return w;
  double r = std::pow(std::abs(w), 1.0 / m);
  double base = std::arg(w) / m;
  cplx best, second;
  double dbest = 1e300, dsecond = 1e300;
  for (int j = 0; j < m; ++j) {
    cplx cand = std::polar(r, base + 2.0 * M_PI * j / m);
    double d = std::abs(cand - hint);
    if (d < dbest) {
      second = best;
      dsecond = dbest;
      best = cand;
      dbest = d;
    } else if (d < dsecond) {
      second = cand;
      dsecond = d;
    }
  }
  if (m > 1 && dbest > ambiguity_ratio * dsecond)
    throw Error(ErrorCode::BranchJump, "ambiguous root branch");
  return best;
}

}  // namespace

ChartAtlas::ChartAtlas(const NewtonMap& map, const std::vector<int>& immediate_degrees,
                       ChartOptions opts)
    : map_(&map), opts_(opts) {
  const auto& spec = map.spec();
  if (!spec.all_simple())
    throw Error(ErrorCode::MultipleRootUnsupported,
                "charts require simple roots (attracting centers have no power model)");
  if (static_cast<int>(immediate_degrees.size()) != spec.distinct_count())
    throw Error(ErrorCode::InvalidArgument, "one degree per immediate basin required");

  const std::size_t M = static_cast<std::size_t>(opts_.series_order);
  for (int k = 0; k < spec.distinct_count(); ++k) {
    Component comp;
    comp.id = k;
    comp.center = spec.roots[k].location;
    comp.degree = immediate_degrees[k];
    comp.image = k;
    comp.immediate = true;
    comp.root_index = k;
    comp.depth = 0;
    components_.push_back(comp);

    const cplx a = comp.center;
    const int m = comp.degree;
    if (m < 2)
      throw Error(ErrorCode::InvalidArgument, "immediate basin degree must be at least 2");

    // Taylor of f at the center: F = zeta - P/P'
    std::size_t order = M + static_cast<std::size_t>(m) + 2;
    Series P = taylor_of_p(spec, a, order);
    Series Pp(P.size() - 1);
    for (std::size_t i = 1; i < P.size(); ++i) Pp[i - 1] = static_cast<double>(i) * P[i];
    Series F = series_mul(P, series_inverse(Pp, order), order);
    // F := zeta - P/P'
    for (auto& c : F) c = -c;
    if (F.size() > 1) F[1] += 1.0;

    // the first m-1 coefficients must vanish at a superattracting center
    double head = 0.0, lead = std::abs(F[static_cast<std::size_t>(m)]);
    for (int j = 0; j < m; ++j) head = std::max(head, std::abs(F[static_cast<std::size_t>(j)]));
    if (lead < 1e-12 || head > 1e-9 * std::max(1.0, lead))
      throw Error(ErrorCode::OrbitEscapedComponent,
                  "declared basin degree does not match the local expansion");
    for (int j = 0; j < m; ++j) F[static_cast<std::size_t>(j)] = 0.0;

    // Boettcher series: phi = lambda zeta u(zeta), v u(F) = u^m with
    // F = c_m zeta^m v
    cplx cm = F[static_cast<std::size_t>(m)];
    cplx log_cm = std::log(std::abs(cm)) + cplx(0.0, 1.0) * std::arg(cm);
    cplx lambda = std::exp((log_cm + cplx(0.0, 2.0 * M_PI * 0 /*token*/)) /
                           static_cast<double>(m - 1));

    Series v(M + 1, cplx(0.0));
    v[0] = 1.0;
    for (std::size_t j = 1; j <= M; ++j) {
      std::size_t src = static_cast<std::size_t>(m) + j;
      v[j] = (src < F.size()) ? F[src] / cm : cplx(0.0);
    }
    Series Fs(M + 1, cplx(0.0));  // F truncated for composition
    for (std::size_t j = 0; j <= M && j < F.size(); ++j) Fs[j] = F[j];

    Series u(M + 1, cplx(0.0));
    u[0] = 1.0;
    for (std::size_t k = 1; k <= M; ++k) {
      Series lhs = series_mul(v, series_compose(u, Fs, M), M);
      Series rhs = series_pow(u, m, M);
      cplx resid = lhs[k] - rhs[k];
      u[k] = resid / static_cast<double>(m);
    }

    BoettcherChart chart;
    chart.component = k;
    chart.center = a;
    chart.degree = m;
    chart.phi.assign(M + 2, cplx(0.0));
    for (std::size_t j = 0; j <= M; ++j) chart.phi[j + 1] = lambda * u[j];

    // validity radius: conjugacy verified on sample circles
    double rho = 0.5 * spec.min_separation();
    for (const auto& pole : map.poles())
      rho = std::min(rho, 0.5 * std::abs(pole.location - a));
    bool ok = false;
    for (int shrink = 0; shrink < 60; ++shrink) {
      ok = true;
      for (int s = 0; s < 16 && ok; ++s) {
        cplx zeta = std::polar(rho, 2.0 * M_PI * s / 16.0 + 0.1);
        SpherePoint img = map.eval(SpherePoint(a + zeta));
        if (!img.finite() || std::abs(img.z - a) > rho) {
          ok = false;
          break;
        }
        cplx lhs = series_value(chart.phi, img.z - a);
        cplx rhs = std::pow(series_value(chart.phi, zeta), m);
        if (std::abs(lhs - rhs) > opts_.conjugacy_check + 1e-9 * std::abs(rhs)) ok = false;
      }
      if (ok) break;
      rho *= 0.8;
    }
    if (!ok)
      throw Error(ErrorCode::OrbitEscapedComponent,
                  "no validity disk for the local series at root " + std::to_string(k));
    chart.zeta_radius = rho;
    double min_abs = 1e300;
    for (int s = 0; s < 16; ++s) {
      cplx zeta = std::polar(0.6 * rho, 2.0 * M_PI * s / 16.0);
      min_abs = std::min(min_abs, std::abs(series_value(chart.phi, zeta)));
    }
    chart.seed_abs = 0.8 * min_abs;
    charts_[k] = chart;
  }
}

int ChartAtlas::immediate_component(int root_index) const {
  for (const auto& c : components_)
    if (c.immediate && c.root_index == root_index) return c.id;
  throw Error(ErrorCode::InvalidArgument, "no immediate component for that root");
}

int ChartAtlas::find_component_by_center(cplx center, double tol) const {
  for (const auto& c : components_)
    if (std::abs(c.center - center) < tol) return c.id;
  return -1;
}

std::vector<int> ChartAtlas::preimage_components(int id) {
  auto it = preimages_.find(id);
  if (it != preimages_.end()) return it->second;

  const Component& target = components_.at(id);
  std::vector<int> found;
  for (const auto& fib : map_->fiber(SpherePoint(target.center))) {
    int existing = find_component_by_center(fib.location);
    if (existing >= 0) {
      found.push_back(existing);
      continue;
    }
    Component comp;
    comp.id = static_cast<int>(components_.size());
    comp.center = fib.location;
    comp.degree = fib.multiplicity;
    comp.image = id;
    comp.immediate = false;
    comp.root_index = target.root_index;
    comp.depth = target.depth + 1;
    components_.push_back(comp);
    found.push_back(comp.id);
  }
  preimages_[id] = found;
  return found;
}

cplx ChartAtlas::series_eval(const BoettcherChart& c, cplx zeta) const {
  return series_value(c.phi, zeta);
}

cplx ChartAtlas::series_invert(const BoettcherChart& c, cplx w) const {
  cplx lambda = c.phi[1];
  cplx zeta = w / lambda;
  for (int it = 0; it < 60; ++it) {
    cplx f = series_value(c.phi, zeta) - w;
    cplx df = series_derivative_value(c.phi, zeta);
    cplx step = f / df;
    zeta -= step;
    if (std::abs(zeta) > c.zeta_radius)
      throw Error(ErrorCode::BranchJump, "series inversion left the validity disk");
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(zeta))) break;
  }
  return c.center + zeta;
}

bool ChartAtlas::in_series_disk(const BoettcherChart& c, cplx z) const {
  return std::abs(z - c.center) <= 0.8 * c.zeta_radius;
}

cplx ChartAtlas::pull_once(cplx y, cplx hint) const {
  const NewtonMap& f = *map_;
  bool far = std::abs(y) > kInfChartThreshold || std::abs(hint) > kInfChartThreshold;

  cplx z = hint;
  if (!far) {
    bool converged = false;
    for (int it = 0; it < 80; ++it) {
      SpherePoint fz = f.eval(SpherePoint(z));
      if (fz.at_inf) {
        z += 1e-9 * (1.0 + std::abs(z));
        continue;
      }
      cplx err = fz.z - y;
      if (std::abs(err) < 1e-12 * (1.0 + std::abs(y))) {
        converged = true;
        break;
      }
      cplx d = f.derivative(z);
      if (std::abs(d) < 1e-16) {
        // nudge off a critical point and keep iterating
        z += 1e-7 * (1.0 + std::abs(z)) * cplx(0.80901699, 0.58778525);
        continue;
      }
      cplx step = err / d;
      double cap = 0.25 * (1.0 + std::abs(z));
      if (std::abs(step) > cap) step *= cap / std::abs(step);
      z -= step;
    }
    if (!converged) throw Error(ErrorCode::ContinuationStalled, "corrector did not converge");
    // separation audit against the full fiber
    if (std::abs(y) < 1e3) {
      double d1 = std::abs(z - hint);
      double d2 = 1e300;
      for (const auto& other : f.fiber(SpherePoint(y))) {
        double d = std::abs(other.location - hint);
        if (std::abs(other.location - z) < 1e-6 * (1.0 + std::abs(z))) continue;
        d2 = std::min(d2, d);
      }
      if (d1 > opts_.ambiguity_ratio * d2)
        throw Error(ErrorCode::BranchJump, "corrector landed near a competing preimage");
    }
    return z;
  }

  // 1/z chart near infinity; f is injective there so no audit is needed
  cplx u = 1.0 / hint;
  cplx target = 1.0 / y;
  for (int it = 0; it < 80; ++it) {
    cplx zbig = 1.0 / u;
    SpherePoint fz = f.eval(SpherePoint(zbig));
    cplx g = fz.at_inf ? cplx(0.0) : 1.0 / fz.z;
    cplx err = g - target;
    if (std::abs(err) < 1e-18 + 1e-12 * std::abs(target)) return 1.0 / u;
    // d/du [1/f(1/u)] = f'(1/u) / (u^2 f(1/u)^2)
    cplx fp = f.derivative(zbig);
    cplx dg = fp / (u * u * fz.z * fz.z);
    if (std::abs(dg) < 1e-30) throw Error(ErrorCode::ContinuationStalled, "flat chart step");
    u -= err / dg;
  }
  throw Error(ErrorCode::ContinuationStalled, "corrector did not converge near infinity");
}

cplx ChartAtlas::point_at(int comp_id, cplx w, cplx hint) const {
  const Component& comp = components_.at(comp_id);
  if (std::abs(w) >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "coordinate modulus must be below one");
  if (comp.immediate) {
    const BoettcherChart& c = charts_.at(comp.id);
    if (std::abs(w) <= c.seed_abs) return series_invert(c, w);
  } else if (std::abs(w) == 0.0) {
    return comp.center;
  }
  cplx w_img = std::pow(w, comp.degree);
  SpherePoint fh = map_->eval(SpherePoint(hint));
  if (fh.at_inf) throw Error(ErrorCode::BranchJump, "hint orbit hit a pole");
  cplx y = point_at(comp.image, w_img, fh.z);
  return pull_once(y, hint);
}

std::vector<cplx> ChartAtlas::trace_w_path(int comp_id, const std::vector<cplx>& w_path) const {
  const Component& comp = components_.at(comp_id);
  std::vector<cplx> out;
  out.reserve(w_path.size());
  cplx hint = comp.center;
  cplx prev_w = 0.0;
  for (const auto& w_target : w_path) {
    // adaptive stepping in w between prev_w and w_target
    double lo = 0.0;
    cplx z = hint;
    int guard = 0;
    double step = 1.0;
    while (lo < 1.0) {
      double hi = std::min(1.0, lo + step);
      cplx w_mid = prev_w + (w_target - prev_w) * hi;
      try {
        z = point_at(comp_id, w_mid, z);
        lo = hi;
        step = std::min(1.0, step * 2.0);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BranchJump) throw;
        step *= 0.5;
        if (++guard > 48)
          throw Error(ErrorCode::ContinuationStalled, "w-path refinement underflow");
      }
    }
    out.push_back(z);
    hint = z;
    prev_w = w_target;
  }
  return out;
}

double ChartAtlas::abs_coord(int comp_id, cplx z) const {
  const Component& comp = components_.at(comp_id);
  if (!comp.immediate)
    throw Error(ErrorCode::InvalidArgument, "abs_coord is defined on immediate components");
  const BoettcherChart& c = charts_.at(comp.id);
  double exponent = 1.0;
  SpherePoint p(z);
  for (int t = 0; t < 256; ++t) {
    if (!p.finite()) throw Error(ErrorCode::OrbitEscapedComponent, "orbit left the plane");
    if (in_series_disk(c, p.z)) {
      double inner = std::abs(series_value(c.phi, p.z - c.center));
      return std::pow(inner, exponent);
    }
    p = map_->eval(p);
    exponent /= comp.degree;
  }
  throw Error(ErrorCode::OrbitEscapedComponent, "orbit did not reach the series disk");
}

ChartAtlas::Tower ChartAtlas::tower_at(int comp_id, cplx z, const Tower* hint) const {
  const Component& comp = components_.at(comp_id);
  const BoettcherChart& c = charts_.at(comp_id);
  Tower tw;
  tw.z0 = z;
  SpherePoint p(z);
  for (int t = 0; t < 256; ++t) {
    if (!p.finite()) throw Error(ErrorCode::OrbitEscapedComponent, "orbit left the plane");
    tw.orbit.push_back(p.z);
    if (in_series_disk(c, p.z)) break;
    p = map_->eval(p);
    if (t == 255)
      throw Error(ErrorCode::OrbitEscapedComponent, "orbit did not reach the series disk");
  }
  tw.values.assign(tw.orbit.size(), cplx(0.0));
  std::size_t top = tw.orbit.size() - 1;
  tw.values[top] = series_value(c.phi, tw.orbit[top] - c.center);
  for (std::size_t t = top; t-- > 0;) {
    cplx w_next = tw.values[t + 1];
    cplx h;
    if (hint && t < hint->values.size()) {
      h = hint->values[t];
    } else if (hint) {
      // the hint orbit is already inside the disk at this depth
      cplx hz = hint->orbit.back();
      for (std::size_t s = hint->orbit.size() - 1; s < t; ++s) {
        SpherePoint q = map_->eval(SpherePoint(hz));
        if (!q.finite()) throw Error(ErrorCode::OrbitEscapedComponent, "hint orbit escaped");
        hz = q.z;
      }
      h = series_value(c.phi, hz - c.center);
    } else {
      throw Error(ErrorCode::BranchJump, "deep tower requires a continuation hint");
    }
    tw.values[t] = nth_root_near(w_next, comp.degree, h, 1.0 / opts_.ambiguity_ratio);
  }
  return tw;
}

cplx ChartAtlas::coord_hinted(int comp_id, cplx z, cplx w_hint) const {
  const Component& comp = components_.at(comp_id);
  if (!comp.immediate)
    throw Error(ErrorCode::InvalidArgument, "hinted coordinates are for immediate components");
  const BoettcherChart& c = charts_.at(comp_id);
  if (in_series_disk(c, z)) return series_value(c.phi, z - c.center);

  Tower hint;
  hint.z0 = z;
  SpherePoint p(z);
  cplx h = w_hint;
  for (int t = 0; t < 256; ++t) {
    if (!p.finite()) throw Error(ErrorCode::OrbitEscapedComponent, "orbit left the plane");
    hint.orbit.push_back(p.z);
    hint.values.push_back(h);
    if (in_series_disk(c, p.z)) break;
    p = map_->eval(p);
    h = std::pow(h, comp.degree);
  }
  Tower tw = tower_at(comp_id, z, &hint);
  return tw.values[0];
}

cplx ChartAtlas::coord(int comp_id, cplx z) const {
  const Component& comp = components_.at(comp_id);
  if (!comp.immediate) {
    // chain through the image component; branch continuity by marching from
    // the center of this component
    SpherePoint fz = map_->eval(SpherePoint(z));
    if (!fz.finite()) throw Error(ErrorCode::OrbitEscapedComponent, "point maps to infinity");
    if (comp.degree == 1) return coord(comp.image, fz.z);
    int steps = 24;
    cplx prev_val = 0.0;
    cplx val = 0.0;
    for (int s = 1; s <= steps; ++s) {
      cplx pt = comp.center + (z - comp.center) * (static_cast<double>(s) / steps);
      SpherePoint fp = map_->eval(SpherePoint(pt));
      if (!fp.finite()) throw Error(ErrorCode::OrbitEscapedComponent, "march hit a pole");
      cplx img = coord(comp.image, fp.z);
      val = (s == 1) ? std::pow(img, 1.0 / comp.degree)
                     : nth_root_near(img, comp.degree, prev_val, 1.0 / opts_.ambiguity_ratio);
      prev_val = val;
    }
    return val;
  }

  const BoettcherChart& c = charts_.at(comp_id);
  if (in_series_disk(c, z)) return series_value(c.phi, z - c.center);

  // march from the series disk toward z with tower continuation
  cplx dir = z - c.center;
  double total = std::abs(dir);
  double s0 = 0.6 * c.zeta_radius / total;
  Tower prev = tower_at(comp_id, c.center + dir * s0, nullptr);
  double s = s0;
  double step = s0;
  while (s < 1.0) {
    double s_next = std::min(1.0, s + step);
    try {
      Tower cur = tower_at(comp_id, c.center + dir * s_next, &prev);
      prev = cur;
      s = s_next;
      step = std::min(1.0, step * 1.7);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BranchJump) throw;
      step *= 0.5;
      if (step < 1e-7)
        throw Error(ErrorCode::ContinuationStalled, "coordinate march underflow");
    }
  }
  return prev.values[0];
}

}  // namespace newton
