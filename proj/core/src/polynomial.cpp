#include "newton/polynomial.hpp"

#include <algorithm>
#include <limits>

#include "json.hpp"

namespace newton {

double PolynomialSpec::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      best = std::min(best, std::abs(roots[i].location - roots[j].location));
  return best;
}

void PolynomialSpec::validate(double merge_tol) const {
  if (std::abs(leading) == 0.0 || !std::isfinite(leading.real()) || !std::isfinite(leading.imag()))
    throw Error(ErrorCode::InvalidArgument, "leading coefficient must be finite and nonzero");
  if (distinct_count() < 2)
    throw Error(ErrorCode::InvalidArgument, "need at least two distinct roots");
  for (const auto& r : roots) {
    if (!std::isfinite(r.location.real()) || !std::isfinite(r.location.imag()))
      throw Error(ErrorCode::InvalidArgument, "root locations must be finite");
    if (r.multiplicity < 1)
      throw Error(ErrorCode::InvalidArgument, "multiplicities must be >= 1");
  }
  if (min_separation() <= merge_tol)
    throw Error(ErrorCode::InvalidArgument, "duplicate roots: separation below merge tolerance");
}

EvalResult eval_all(const PolynomialSpec& spec, cplx z) {
  const auto& roots = spec.roots;
  // nearest root and a local scale
  std::size_t nearest = 0;
  double dist = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    double d = std::abs(z - roots[k].location);
    scale = std::max(scale, std::abs(roots[k].location));
    if (d < dist) {
      dist = d;
      nearest = k;
    }
  }

  if (dist > 1e-3 * scale) {
    // log-derivative form
    cplx P = spec.leading;
    cplx S = 0.0, Sp = 0.0;
    for (const auto& r : roots) {
      cplx d = z - r.location;
      cplx dn = 1.0;
      for (int i = 0; i < r.multiplicity; ++i) dn *= d;
      P *= dn;
      cplx inv = 1.0 / d;
      S += static_cast<double>(r.multiplicity) * inv;
      Sp -= static_cast<double>(r.multiplicity) * inv * inv;
    }
    return {P, P * S, P * (S * S + Sp)};
  }

  // product form around the nearest root: p = delta^n Q
  const auto& rm = roots[nearest];
  cplx delta = z - rm.location;
  int n = rm.multiplicity;
  cplx Q = spec.leading;
  cplx SQ = 0.0, SQp = 0.0;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    if (k == nearest) continue;
    const auto& r = roots[k];
    cplx d = z - r.location;
    cplx dn = 1.0;
    for (int i = 0; i < r.multiplicity; ++i) dn *= d;
    Q *= dn;
    cplx inv = 1.0 / d;
    SQ += static_cast<double>(r.multiplicity) * inv;
    SQp -= static_cast<double>(r.multiplicity) * inv * inv;
  }
  cplx Qp = Q * SQ;
  cplx Qpp = Q * (SQ * SQ + SQp);

  auto pow_delta = [&](int e) {
    cplx v = 1.0;
    for (int i = 0; i < e; ++i) v *= delta;
    return v;
  };

  cplx nn(static_cast<double>(n), 0.0);
  cplx p = pow_delta(n) * Q;
  cplx dp = pow_delta(n - 1) * (nn * Q + delta * Qp);
  cplx ddp;
  if (n == 1) {
    ddp = 2.0 * Qp + delta * Qpp;
  } else {
    ddp = pow_delta(n - 2) *
          (nn * (nn - 1.0) * Q + 2.0 * nn * delta * Qp + delta * delta * Qpp);
  }
  return {p, dp, ddp};
}

std::vector<cplx> expand_coefficients(const PolynomialSpec& spec) {
  std::vector<cplx> c{spec.leading};
  for (const auto& r : spec.roots) {
    for (int i = 0; i < r.multiplicity; ++i) {
      // multiply by (z - a)
      std::vector<cplx> next(c.size() + 1, cplx(0.0));
      for (std::size_t k = 0; k < c.size(); ++k) {
        next[k + 1] += c[k];
        next[k] -= r.location * c[k];
      }
      c.swap(next);
    }
  }
  return c;
}

std::vector<cplx> differentiate(const std::vector<cplx>& coeffs) {
  if (coeffs.size() <= 1) return {cplx(0.0)};
  std::vector<cplx> d(coeffs.size() - 1);
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    d[k - 1] = static_cast<double>(k) * coeffs[k];
  return d;
}

cplx horner(const std::vector<cplx>& coeffs, cplx z) {
  cplx acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
  return acc;
}

std::vector<cplx> distinct_product(const PolynomialSpec& spec) {
  std::vector<cplx> c{cplx(1.0)};
  for (const auto& r : spec.roots) {
    std::vector<cplx> next(c.size() + 1, cplx(0.0));
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r.location * c[k];
    }
    c.swap(next);
  }
  return c;
}

namespace {
// exact synthetic division of a monic-rooted polynomial by (z - a)
std::vector<cplx> divide_linear(const std::vector<cplx>& c, cplx a) {
  std::vector<cplx> q(c.size() - 1);
  cplx carry = c.back();
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    q[i] = carry;
    carry = c[i] + carry * a;
  }
  return q;
}
}  // namespace

std::vector<cplx> reduced_denominator(const PolynomialSpec& spec) {
  auto full = distinct_product(spec);
  std::vector<cplx> T(full.size() - 1, cplx(0.0));
  for (const auto& r : spec.roots) {
    auto q = divide_linear(full, r.location);
    for (std::size_t i = 0; i < q.size(); ++i)
      T[i] += static_cast<double>(r.multiplicity) * q[i];
  }
  return T;
}

std::string PolynomialSpec::to_json() const {
  nlohmann::ordered_json j;
  j["leading"] = {leading.real(), leading.imag()};
  j["roots"] = nlohmann::ordered_json::array();
  for (const auto& r : roots) {
    nlohmann::ordered_json e;
    e["location"] = {r.location.real(), r.location.imag()};
    e["multiplicity"] = r.multiplicity;
    j["roots"].push_back(e);
  }
  return j.dump();
}

PolynomialSpec PolynomialSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  PolynomialSpec spec;
  try {
    auto lead = j.at("leading");
    spec.leading = cplx(lead.at(0).get<double>(), lead.at(1).get<double>());
    for (const auto& e : j.at("roots")) {
      RootEntry r;
      auto loc = e.at("location");
      r.location = cplx(loc.at(0).get<double>(), loc.at(1).get<double>());
      r.multiplicity = e.at("multiplicity").get<int>();
      spec.roots.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("polynomial spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace newton
