#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "newton/polynomial.hpp"
#include "newton/roots.hpp"

using namespace newton;

TEST_CASE("solves a quadratic exactly") {
  // z^2 + 1
  auto r = solve_polynomial({cplx(1, 0), cplx(0, 0), cplx(1, 0)});
  REQUIRE(r.size() == 2);
  for (const auto& c : r) {
    CHECK(std::abs(std::abs(c.location.imag()) - 1.0) < 1e-12);
    CHECK(std::abs(c.location.real()) < 1e-12);
    CHECK(c.multiplicity == 1);
  }
}

TEST_CASE("detects the double zero of 3 z^2") {
  auto r = solve_polynomial({cplx(0, 0), cplx(0, 0), cplx(3, 0)});
  REQUIRE(r.size() == 1);
  CHECK(r[0].multiplicity == 2);
  CHECK(std::abs(r[0].location) < 1e-7);
}

TEST_CASE("factored double root (3z+1)(z-1)") {
  // 3z^2 - 2z - 1
  auto r = solve_polynomial({cplx(-1, 0), cplx(-2, 0), cplx(3, 0)});
  REQUIRE(r.size() == 2);
  std::sort(r.begin(), r.end(),
            [](const auto& a, const auto& b) { return a.location.real() < b.location.real(); });
  CHECK(std::abs(r[0].location - cplx(-1.0 / 3.0, 0)) < 1e-10);
  CHECK(std::abs(r[1].location - cplx(1, 0)) < 1e-10);
}

TEST_CASE("random polynomials reproduce their roots") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 60; ++trial) {
    int deg = 2 + static_cast<int>(rng() % 6);
    std::vector<cplx> roots;
    bool ok = true;
    for (int i = 0; i < deg; ++i) {
      cplx z(u(rng), u(rng));
      for (const auto& r : roots)
        if (std::abs(r - z) < 0.05) ok = false;
      roots.push_back(z);
    }
    if (!ok) continue;
    // expand
    std::vector<cplx> c{cplx(1, 0)};
    for (const auto& r : roots) {
      std::vector<cplx> next(c.size() + 1, cplx(0, 0));
      for (std::size_t k = 0; k < c.size(); ++k) {
        next[k + 1] += c[k];
        next[k] -= r * c[k];
      }
      c.swap(next);
    }
    auto found = aberth_roots(c);
    REQUIRE(found.size() == roots.size());
    for (const auto& r : roots) {
      double best = 1e9;
      for (const auto& f : found) best = std::min(best, std::abs(f - r));
      CHECK(best < 1e-8);
    }
  }
}

TEST_CASE("triple root is clustered and polished") {
  // (z - 0.5)^3 = z^3 - 1.5 z^2 + 0.75 z - 0.125
  auto r = solve_polynomial({cplx(-0.125, 0), cplx(0.75, 0), cplx(-1.5, 0), cplx(1, 0)});
  REQUIRE(r.size() == 1);
  CHECK(r[0].multiplicity == 3);
  CHECK(std::abs(r[0].location - cplx(0.5, 0)) < 1e-9);
}
