#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "newton/basin.hpp"
#include "newton/chart.hpp"
#include "newton/ray.hpp"

using namespace newton;

namespace {

PolynomialSpec cubic_unity() {
  PolynomialSpec s;
  s.roots = {{cplx(1, 0), 1}, {cplx(-0.5, std::sqrt(3.0) / 2), 1}, {cplx(-0.5, -std::sqrt(3.0) / 2), 1}};
  return s;
}

std::vector<int> basin_degrees(const NewtonMap& f) {
  auto field = classify(f, {-3, 3, -3, 3}, 256, 256);
  auto imm = immediate_basins(field, f);
  std::vector<int> deg(f.degree(), 2);
  for (const auto& rec : imm) deg[rec.basin_index] = rec.map_degree;
  return deg;
}

}  // namespace

TEST_CASE("chart centers and local normalization") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  for (int k = 0; k < 3; ++k) {
    const auto& chart = atlas.chart(k);
    CHECK(chart.degree == 2);
    CHECK(chart.zeta_radius > 0.01);
    CHECK(chart.seed_abs > 0.001);
    // Phi(center) = 0
    CHECK(std::abs(atlas.coord(k, chart.center + cplx(1e-9, 0))) < 1e-6);
  }
}

TEST_CASE("charts reject multiple roots") {
  PolynomialSpec s;
  s.roots = {{cplx(1, 0), 2}, {cplx(-1, 0), 1}};
  NewtonMap f(s);
  CHECK_THROWS_AS(ChartAtlas(f, {2, 2}), Error);
}

TEST_CASE("conjugacy residual on 100 samples per basin") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> upot(0.1, 0.9), uang(0.0, 1.0);
  for (int k = 0; k < 3; ++k) {
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      cplx w = std::polar(upot(rng), 2.0 * M_PI * uang(rng));
      // place the sample by inverse continuation along its radial path
      std::vector<cplx> path;
      for (int j = 1; j <= 24; ++j) path.push_back(w * (j / 24.0));
      cplx z = atlas.trace_w_path(k, path).back();

      cplx w_z = atlas.coord_hinted(k, z, w);
      SpherePoint fz = f.eval(SpherePoint(z));
      REQUIRE(fz.finite());
      cplx w_fz = atlas.coord_hinted(k, fz.z, w * w);
      worst = std::max(worst, std::abs(w_fz - w_z * w_z));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("forward coordinate inverts the chart without hints near the ray") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  // moderate-potential points reachable by the straight center march
  for (double t : {0.2, 0.45, 0.7}) {
    for (double ang : {0.05, 0.3, 0.62}) {
      cplx w = std::polar(t, 2.0 * M_PI * ang);
      std::vector<cplx> path;
      for (int j = 1; j <= 16; ++j) path.push_back(w * (j / 16.0));
      cplx z = atlas.trace_w_path(0, path).back();
      cplx back = atlas.coord(0, z);
      CHECK(std::abs(back - w) < 1e-8);
    }
  }
}

TEST_CASE("abs_coord agrees with the full coordinate") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  for (double t : {0.3, 0.6, 0.85}) {
    cplx w = std::polar(t, 2.0 * M_PI * 0.37);
    std::vector<cplx> path;
    for (int j = 1; j <= 16; ++j) path.push_back(w * (j / 16.0));
    cplx z = atlas.trace_w_path(0, path).back();
    CHECK(std::abs(atlas.abs_coord(0, z) - t) < 1e-9);
  }
}

TEST_CASE("preimage components of an immediate basin") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  auto pre = atlas.preimage_components(0);
  // the basin itself (center is its own preimage) plus one conformal copy
  REQUIRE(pre.size() == 2);
  bool has_self = false, has_copy = false;
  for (int id : pre) {
    const auto& c = atlas.component(id);
    if (id == 0) has_self = true;
    if (!c.immediate) {
      has_copy = true;
      CHECK(c.degree == 1);
      CHECK(std::abs(c.center - cplx(-0.5, 0)) < 1e-9);
    }
  }
  CHECK(has_self);
  CHECK(has_copy);
}

TEST_CASE("fixed rays land at infinity") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  RayTracer tracer(atlas);
  for (int k = 0; k < 3; ++k) {
    const auto& r = tracer.ray(k, Angle(0, 1));
    REQUIRE(r.landed);
    CHECK(chordal(r.landing, SpherePoint::infinity()) < 1e-6);
    // invariance: f(sample at t) sits on the same ray at t^2
    for (std::size_t i = 16; i < r.samples.size(); i += 24) {
      SpherePoint img = f.eval(SpherePoint(r.samples[i].point));
      REQUIRE(img.finite());
      cplx expect = tracer.ray_point(k, Angle(0, 1), 2.0 * r.samples[i].log_potential);
      CHECK(chordal(img, SpherePoint(expect)) < 1e-8);
    }
  }
}

TEST_CASE("the one-half ray lands on the pole") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  RayTracer tracer(atlas);
  for (int k = 0; k < 3; ++k) {
    auto landing = tracer.land(k, Angle(1, 2));
    REQUIRE(landing.finite());
    CHECK(std::abs(landing.z) < 1e-6);  // the order-two pole at the origin
    // landing point maps to infinity in one step
    CHECK(f.eval(landing).at_inf);
  }
}

TEST_CASE("ray functional equation across angles") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  RayTracer tracer(atlas);
  // angle 1/3 maps to 2/3 maps to 1/3: a two-cycle
  const auto& r13 = tracer.ray(0, Angle(1, 3));
  const auto& r23 = tracer.ray(0, Angle(2, 3));
  REQUIRE(r13.samples.size() > 40);
  for (std::size_t i = 20; i < r13.samples.size(); i += 16) {
    SpherePoint img = f.eval(SpherePoint(r13.samples[i].point));
    REQUIRE(img.finite());
    // image lies on the angle-2/3 ray at doubled log-potential
    std::size_t j = i - 16;  // one level deeper on the 16-step grid
    CHECK(std::abs(img.z - r23.samples[j].point) < 1e-8 * (1.0 + std::abs(img.z)));
  }
}

TEST_CASE("landing is stable under grid refinement") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  RayOptions coarse, fine;
  fine.steps_per_level = 32;
  RayTracer t1(atlas, coarse), t2(atlas, fine);
  auto l1 = t1.land(0, Angle(1, 2));
  auto l2 = t2.land(0, Angle(1, 2));
  CHECK(chordal(l1, l2) < 1e-6);
}

TEST_CASE("sector membership is consistent with the coordinate") {
  NewtonMap f(cubic_unity());
  ChartAtlas atlas(f, basin_degrees(f));
  RayTracer tracer(atlas);
  Sector s{0, Angle(1, 8), Angle(3, 8), 0.3};
  std::vector<cplx> path;
  for (int j = 1; j <= 12; ++j) path.push_back(std::polar(0.6 * j / 12.0, 2.0 * M_PI * 0.25));
  cplx inside = atlas.trace_w_path(0, path).back();
  CHECK(tracer.sector_contains(s, inside));

  std::vector<cplx> path2;
  for (int j = 1; j <= 12; ++j) path2.push_back(std::polar(0.6 * j / 12.0, 2.0 * M_PI * 0.6));
  cplx outside = atlas.trace_w_path(0, path2).back();
  CHECK(!tracer.sector_contains(s, outside));
}
