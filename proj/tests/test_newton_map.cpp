#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "newton/newton_map.hpp"

using namespace newton;

namespace {

PolynomialSpec cubic_unity() {
  PolynomialSpec s;
  s.roots = {{cplx(1, 0), 1}, {cplx(-0.5, std::sqrt(3.0) / 2), 1}, {cplx(-0.5, -std::sqrt(3.0) / 2), 1}};
  return s;
}

PolynomialSpec quadratic(double a) {
  // z^2 - a
  PolynomialSpec s;
  s.roots = {{cplx(std::sqrt(a), 0), 1}, {cplx(-std::sqrt(a), 0), 1}};
  return s;
}

std::mt19937_64 rng(4242);

PolynomialSpec random_spec(int max_d = 6, int max_mult = 4) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    PolynomialSpec s;
    int d = 2 + static_cast<int>(rng() % (max_d - 1));
    for (int k = 0; k < d; ++k)
      s.roots.push_back({cplx(u(rng), u(rng)), 1 + static_cast<int>(rng() % max_mult)});
    try {
      s.validate();
      if (s.min_separation() > 0.1) return s;
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST_CASE("babylonian average for z^2 - a") {
  NewtonMap f(quadratic(4.0));
  auto y = f.eval(SpherePoint(cplx(1, 0)));
  CHECK(y.finite());
  CHECK(std::abs(y.z - cplx(2.5, 0)) < 1e-14);  // (z + a/z)/2 at z=1
}

TEST_CASE("roots are fixed and the pole goes to infinity") {
  NewtonMap f(cubic_unity());
  CHECK(std::abs(f.eval(SpherePoint(cplx(1, 0))).z - cplx(1, 0)) < 1e-14);
  CHECK(f.eval(SpherePoint(cplx(0, 0))).at_inf);
  CHECK(f.eval(SpherePoint::infinity()).at_inf);
}

TEST_CASE("fixed point records carry the multiplier formulas") {
  PolynomialSpec s;
  s.roots = {{cplx(0, 0), 1}, {cplx(2, 0), 2}, {cplx(-2, 0), 3}};
  NewtonMap f(s);
  const auto& fps = f.fixed_points();
  REQUIRE(fps.size() == 4);
  CHECK(std::abs(fps[0].multiplier) < 1e-15);
  CHECK(std::abs(fps[1].multiplier - cplx(0.5, 0)) < 1e-15);
  CHECK(std::abs(fps[2].multiplier - cplx(2.0 / 3.0, 0)) < 1e-15);
  CHECK(fps[3].location.at_inf);
  CHECK(std::abs(fps[3].multiplier - cplx(6.0 / 5.0, 0)) < 1e-15);
  CHECK(fps[3].kind == FixedPointKind::Repelling);
  CHECK(fps[0].kind == FixedPointKind::Superattracting);
  CHECK(fps[1].kind == FixedPointKind::Attracting);
}

TEST_CASE("pole structure of the standard examples") {
  NewtonMap f3(cubic_unity());
  auto p3 = f3.poles();
  REQUIRE(p3.size() == 1);
  CHECK(std::abs(p3[0].location) < 1e-8);
  CHECK(p3[0].order == 2);

  NewtonMap f2(quadratic(1.0));
  auto p2 = f2.poles();
  REQUIRE(p2.size() == 1);
  CHECK(std::abs(p2[0].location) < 1e-10);
  CHECK(p2[0].order == 1);

  // (z-1)^2 (z+1): removable zero of p' at the double root, pole at -1/3
  PolynomialSpec s;
  s.roots = {{cplx(1, 0), 2}, {cplx(-1, 0), 1}};
  NewtonMap fm(s);
  auto pm = fm.poles();
  REQUIRE(pm.size() == 1);
  CHECK(std::abs(pm[0].location - cplx(-1.0 / 3.0, 0)) < 1e-10);
  CHECK(pm[0].order == 1);
}

TEST_CASE("critical points of z^3 - 1: the roots and the double pole") {
  NewtonMap f(cubic_unity());
  auto crit = f.critical_points();
  REQUIRE(crit.size() == 4);
  int sum_mult = 0;
  bool has_pole_crit = false;
  for (const auto& c : crit) {
    sum_mult += c.local_degree - 1;
    if (std::abs(c.location.z) < 1e-8) {
      has_pole_crit = true;
      CHECK(c.local_degree == 2);
    }
  }
  CHECK(sum_mult == 2 * f.degree() - 2);
  CHECK(has_pole_crit);
}

TEST_CASE("critical multiplicities sum to 2d-2 on random specs") {
  for (int t = 0; t < 20; ++t) {
    auto spec = random_spec();
    NewtonMap f(spec);
    int sum = 0;
    for (const auto& c : f.critical_points()) sum += c.local_degree - 1;
    CHECK(sum == 2 * f.degree() - 2);
  }
}

TEST_CASE("preimage examples") {
  NewtonMap f2(quadratic(1.0));
  auto pre = f2.preimages(SpherePoint(cplx(0, 0)));
  REQUIRE(pre.size() == 2);
  for (const auto& p : pre) CHECK(std::abs(std::abs(p.z.imag()) - 1.0) < 1e-10);

  NewtonMap f3(cubic_unity());
  auto pinf = f3.preimages(SpherePoint::infinity());
  REQUIRE(pinf.size() == 3);
  int inf_count = 0, zero_count = 0;
  for (const auto& p : pinf) {
    if (p.at_inf) ++inf_count;
    else if (std::abs(p.z) < 1e-8) ++zero_count;
  }
  CHECK(inf_count == 1);
  CHECK(zero_count == 2);
}

TEST_CASE("preimages map back to the target (100 random points)") {
  NewtonMap f(cubic_unity());
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    cplx w(u(rng), u(rng));
    auto pre = f.preimages(SpherePoint(w));
    CHECK(pre.size() == 3);
    for (const auto& z : pre) {
      auto back = f.eval(z);
      REQUIRE(back.finite());
      CHECK(chordal(back, SpherePoint(w)) < 1e-8);
      ++checked;
    }
  }
  CHECK(checked == 300);
}

TEST_CASE("pole orders plus the infinity point account for the full fiber") {
  for (int t = 0; t < 10; ++t) {
    auto spec = random_spec();
    NewtonMap f(spec);
    int total = 0;
    for (const auto& p : f.poles()) total += p.order;
    CHECK(total + 1 == f.degree());
  }
}

TEST_CASE("head check round trip reconstructs multiplicities") {
  for (int t = 0; t < 100; ++t) {
    auto spec = random_spec();
    NewtonMap f(spec);
    std::vector<HeadCandidate> cands;
    for (const auto& r : f.fixed_points()) cands.push_back({r.location, r.multiplier});
    auto res = head_check(cands);
    REQUIRE(res.accepted);
    REQUIRE(res.reconstructed.has_value());
    REQUIRE(res.reconstructed->distinct_count() == spec.distinct_count());
    // match by location
    for (const auto& r : spec.roots) {
      bool found = false;
      for (const auto& q : res.reconstructed->roots) {
        if (std::abs(q.location - r.location) < 1e-9 && q.multiplicity == r.multiplicity)
          found = true;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("head check rejects a non-Newton multiplier") {
  std::vector<HeadCandidate> cands = {
      {SpherePoint(cplx(0, 0)), cplx(0.37, 0)},
      {SpherePoint(cplx(1, 0)), cplx(0, 0)},
      {SpherePoint::infinity(), cplx(1.5, 0)},
  };
  auto res = head_check(cands);
  CHECK(!res.accepted);
  CHECK(!res.reason.empty());
}

TEST_CASE("orbit near a root contracts with ratio (n-1)/n") {
  for (int nk : {1, 2, 3}) {
    PolynomialSpec s;
    s.roots = {{cplx(0, 0), nk}, {cplx(3, 0), 1}};
    NewtonMap f(s);
    cplx z(0.2, 0.1);
    double prev = std::abs(z);
    double ratio = 0.0;
    for (int i = 0; i < 40; ++i) {
      auto y = f.eval(SpherePoint(z));
      REQUIRE(y.finite());
      z = y.z;
      double cur = std::abs(z);
      if (cur < 1e-13) break;
      ratio = cur / prev;
      prev = cur;
    }
    double target = (nk - 1.0) / nk;
    if (nk == 1) {
      CHECK(std::abs(z) < 1e-12);  // superattracting: quadratic collapse
    } else {
      CHECK(std::abs(ratio - target) < 0.02);
    }
  }
}
