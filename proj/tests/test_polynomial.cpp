#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "newton/polynomial.hpp"

using namespace newton;

namespace {

PolynomialSpec cubic_unity() {
  PolynomialSpec s;
  s.roots = {{cplx(1, 0), 1}, {cplx(-0.5, std::sqrt(3.0) / 2), 1}, {cplx(-0.5, -std::sqrt(3.0) / 2), 1}};
  return s;
}

}  // namespace

TEST_CASE("evaluation matches direct expansion") {
  PolynomialSpec s;  // z^2 - 1
  s.roots = {{cplx(1, 0), 1}, {cplx(-1, 0), 1}};
  auto e = eval_all(s, cplx(0, 0));
  CHECK(std::abs(e.p - cplx(-1, 0)) < 1e-14);
  CHECK(std::abs(e.dp) < 1e-14);
  CHECK(std::abs(e.ddp - cplx(2, 0)) < 1e-14);
}

TEST_CASE("value at a root of z^3 - 1") {
  auto s = cubic_unity();
  auto e = eval_all(s, cplx(1, 0));
  CHECK(std::abs(e.p) < 1e-14);
  CHECK(std::abs(e.dp - cplx(3, 0)) < 1e-13);
  CHECK(std::abs(e.ddp - cplx(6, 0)) < 1e-13);
}

TEST_CASE("double root spec (z-1)^2 (z+1)") {
  PolynomialSpec s;
  s.roots = {{cplx(1, 0), 2}, {cplx(-1, 0), 1}};
  // oracle: expanded z^3 - z^2 - z + 1 evaluated directly
  auto e = eval_all(s, cplx(2, 0));
  CHECK(std::abs(e.p - cplx(3, 0)) < 1e-13);
  CHECK(std::abs(e.dp - cplx(7, 0)) < 1e-13);
  CHECK(std::abs(e.ddp - cplx(10, 0)) < 1e-13);
}

TEST_CASE("factored evaluation agrees with Horner on the expansion") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    PolynomialSpec s;
    int d = 2 + static_cast<int>(rng() % 4);
    for (int k = 0; k < d; ++k)
      s.roots.push_back({cplx(u(rng), u(rng)), 1 + static_cast<int>(rng() % 3)});
    try {
      s.validate();
    } catch (const Error&) {
      continue;  // rejected random collision
    }
    auto coeffs = expand_coefficients(s);
    auto dcoeffs = differentiate(coeffs);
    auto ddcoeffs = differentiate(dcoeffs);
    for (int probe = 0; probe < 8; ++probe) {
      cplx z(u(rng), u(rng));
      auto e = eval_all(s, z);
      double scale = std::abs(horner(coeffs, z)) + 1.0;
      CHECK(std::abs(e.p - horner(coeffs, z)) < 1e-9 * scale);
      CHECK(std::abs(e.dp - horner(dcoeffs, z)) < 1e-8 * (std::abs(e.dp) + 1.0));
      CHECK(std::abs(e.ddp - horner(ddcoeffs, z)) < 1e-7 * (std::abs(e.ddp) + 1.0));
    }
  }
}

TEST_CASE("near-root branch is continuous with the generic branch") {
  auto s = cubic_unity();
  // probe just inside and outside the switch radius
  for (double eps : {1e-4, 1e-3 - 1e-9, 1e-3 + 1e-9, 2e-3}) {
    cplx z = cplx(1, 0) + cplx(eps, eps / 3);
    auto e = eval_all(s, z);
    auto coeffs = expand_coefficients(s);
    CHECK(std::abs(e.p - horner(coeffs, z)) < 1e-12);
  }
}

TEST_CASE("reduced denominator of z^3 - 1 is 3 z^2") {
  auto s = cubic_unity();
  auto T = reduced_denominator(s);
  REQUIRE(T.size() == 3);
  CHECK(std::abs(T[0]) < 1e-12);
  CHECK(std::abs(T[1]) < 1e-12);
  CHECK(std::abs(T[2] - cplx(3, 0)) < 1e-12);
}

TEST_CASE("json round trip and field names") {
  PolynomialSpec s;
  s.leading = cplx(2, 1);
  s.roots = {{cplx(1, 0), 2}, {cplx(-1, 0.5), 1}};
  auto text = s.to_json();
  CHECK(text.find("\"leading\"") != std::string::npos);
  CHECK(text.find("\"roots\"") != std::string::npos);
  CHECK(text.find("\"location\"") != std::string::npos);
  CHECK(text.find("\"multiplicity\"") != std::string::npos);
  auto back = PolynomialSpec::from_json(text);
  CHECK(back.distinct_count() == 2);
  CHECK(back.total_degree() == 3);
  CHECK(std::abs(back.leading - s.leading) < 1e-15);
}

TEST_CASE("parser rejects duplicate roots and malformed input") {
  CHECK_THROWS_AS(PolynomialSpec::from_json("{"), Error);
  CHECK_THROWS_AS(
      PolynomialSpec::from_json(
          R"({"leading":[1,0],"roots":[{"location":[1,0],"multiplicity":1},{"location":[1,0],"multiplicity":2}]})"),
      Error);
}
