#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>

#include "newton/basin.hpp"
#include "newton/render.hpp"

using namespace newton;

namespace {

PolynomialSpec cubic_unity() {
  PolynomialSpec s;
  s.roots = {{cplx(1, 0), 1}, {cplx(-0.5, std::sqrt(3.0) / 2), 1}, {cplx(-0.5, -std::sqrt(3.0) / 2), 1}};
  return s;
}

PolynomialSpec quadratic_pm1() {
  PolynomialSpec s;
  s.roots = {{cplx(1, 0), 1}, {cplx(-1, 0), 1}};
  return s;
}

}  // namespace

TEST_CASE("quadratic basins split along the perpendicular bisector") {
  NewtonMap f(quadratic_pm1());
  auto field = classify(f, {-2, 2, -2, 2}, 64, 64);
  int wrong = 0, decided = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      cplx z = field.pixel_center(x, y);
      int k = field.label[field.index(x, y)];
      if (k < 0) continue;
      ++decided;
      if (std::abs(z.real()) > field.epsilon) {
        int expect = z.real() > 0 ? 0 : 1;
        if (k != expect) ++wrong;
      }
    }
  }
  CHECK(decided > 60 * 64);
  CHECK(wrong == 0);
}

TEST_CASE("cubic basins: three immediate components of degree two") {
  NewtonMap f(cubic_unity());
  auto field = classify(f, {-2, 2, -2, 2}, 256, 256);
  auto imm = immediate_basins(field, f);
  REQUIRE(imm.size() == 3);
  for (const auto& rec : imm) {
    CHECK(rec.immediate);
    CHECK(rec.map_degree == 2);
  }
  // distinct components
  CHECK(imm[0].id != imm[1].id);
  CHECK(imm[1].id != imm[2].id);
}

TEST_CASE("immediate components are fixed under the induced component map") {
  NewtonMap f(cubic_unity());
  auto field = classify(f, {-2, 2, -2, 2}, 192, 192);
  auto imm = immediate_basins(field, f);
  auto cmap = f_component_map(field, f);
  for (const auto& rec : imm) {
    REQUIRE(cmap.count(rec.id));
    CHECK(cmap.at(rec.id) == rec.id);
  }
}

TEST_CASE("a preimage component reaches the immediate one in one step") {
  NewtonMap f(cubic_unity());
  auto field = classify(f, {-2, 2, -2, 2}, 256, 256);
  auto imm = immediate_basins(field, f);
  // -1/2 is the non-immediate preimage of root 1
  auto rec = component_of(field, imm, f, cplx(-0.5, 0));
  CHECK(!rec.immediate);
  CHECK(rec.basin_index == 0);
  REQUIRE(!rec.preimage_address.empty());
  CHECK(rec.preimage_address.front() == imm[0].id);
}

TEST_CASE("basin labels are f-compatible away from boundaries") {
  NewtonMap f(cubic_unity());
  auto field = classify(f, {-2, 2, -2, 2}, 128, 128);
  auto is_boundary = [&](int x, int y) {
    int k = field.label[field.index(x, y)];
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      int nx = x + dx, ny = y + dy;
      if (nx < 0 || ny < 0 || nx >= field.width || ny >= field.height) continue;
      if (field.label[field.index(nx, ny)] != k) return true;
    }
    return false;
  };
  int checked = 0, stable = 0;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      int k = field.label[field.index(x, y)];
      if (k < 0 || is_boundary(x, y)) continue;
      SpherePoint img = f.eval(SpherePoint(field.pixel_center(x, y)));
      if (!img.finite()) continue;
      auto [ix, iy] = field.locate(img.z);
      if (ix < 0 || is_boundary(ix, iy)) continue;
      int k2 = field.label[field.index(ix, iy)];
      if (k2 < 0) continue;
      ++checked;
      if (k2 == k) ++stable;
    }
  }
  CHECK(checked > 10000);
  CHECK(stable >= checked * 0.999);
}

TEST_CASE("doubling resolution never flips an interior decided pixel") {
  NewtonMap f(cubic_unity());
  auto coarse = classify(f, {-2, 2, -2, 2}, 64, 64);
  auto fine = classify(f, {-2, 2, -2, 2}, 128, 128);
  auto interior = [&](const BasinField& fld, int x, int y) {
    int k = fld.label[fld.index(x, y)];
    if (k < 0) return false;
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      int nx = x + dx, ny = y + dy;
      if (nx < 0 || ny < 0 || nx >= fld.width || ny >= fld.height) continue;
      if (fld.label[fld.index(nx, ny)] != k) return false;
    }
    return true;
  };
  int flips = 0, compared = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      if (!interior(coarse, x, y)) continue;
      int k = coarse.label[coarse.index(x, y)];
      cplx z = coarse.pixel_center(x, y);
      auto [fx, fy] = fine.locate(z);
      if (!interior(fine, fx, fy)) continue;
      int k2 = fine.label[fine.index(fx, fy)];
      if (k2 >= 0) {
        ++compared;
        if (k2 != k) ++flips;
      }
    }
  }
  CHECK(compared > 2000);
  CHECK(flips == 0);
}

TEST_CASE("pcf verdicts") {
  NewtonMap f3(cubic_unity());
  auto rep3 = pcf_in_basins_check(f3);
  CHECK(rep3.accepted);

  NewtonMap f2(quadratic_pm1());
  CHECK(pcf_in_basins_check(f2).accepted);
}

TEST_CASE("epsilon precondition") {
  NewtonMap f(quadratic_pm1());
  CHECK_THROWS_AS(classify(f, {-2, 2, -2, 2}, 32, 32, /*eps=*/1.5, 100), Error);
}

TEST_CASE("raster round trip") {
  NewtonMap f(quadratic_pm1());
  auto field = classify(f, {-1, 1, -1, 1}, 32, 32);
  std::string path = "/tmp/newton_test_raster.bin";
  write_raster(path, field);
  auto back = read_raster(path);
  CHECK(back.width == field.width);
  CHECK(back.height == field.height);
  CHECK(back.label == field.label);
  CHECK(back.iters == field.iters);
  std::remove(path.c_str());
}

TEST_CASE("png writer emits a valid deterministic file") {
  NewtonMap f(cubic_unity());
  auto field = classify(f, {-2, 2, -2, 2}, 48, 48);
  auto rgb = basin_colors(field, 3);
  std::string p1 = "/tmp/newton_test_a.png", p2 = "/tmp/newton_test_b.png";
  write_png_rgb(p1, 48, 48, rgb);
  write_png_rgb(p2, 48, 48, rgb);
  auto slurp = [](const std::string& p) {
    std::FILE* fp = std::fopen(p.c_str(), "rb");
    REQUIRE(fp);
    std::string s;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, fp)) > 0) s.append(buf, n);
    std::fclose(fp);
    return s;
  };
  auto a = slurp(p1), b = slurp(p2);
  CHECK(a == b);
  CHECK(a.size() > 100);
  CHECK(a.substr(1, 3) == "PNG");
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
