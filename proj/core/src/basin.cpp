#include "newton/basin.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <numeric>

#include "newton/errors.hpp"
#include "newton/parallel.hpp"

namespace newton {

std::pair<int, int> BasinField::locate(cplx z) const {
  if (!window.contains(z)) return {-1, -1};
  int x = static_cast<int>((z.real() - window.x0) / window.width() * width);
  int y = static_cast<int>((z.imag() - window.y0) / window.height() * height);
  x = std::clamp(x, 0, width - 1);
  y = std::clamp(y, 0, height - 1);
  return {x, y};
}

namespace {

// 4-connected labeling of equal-basin pixels, single deterministic pass
void label_components(BasinField& f) {
  const int w = f.width, h = f.height;
  f.comp.assign(static_cast<std::size_t>(w) * h, -1);
  std::vector<std::int32_t> parent;
  auto find = [&](std::int32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::size_t i = f.index(x, y);
      if (f.label[i] < 0) continue;
      std::int32_t left = (x > 0 && f.label[i - 1] == f.label[i]) ? f.comp[i - 1] : -1;
      std::int32_t up = (y > 0 && f.label[i - w] == f.label[i]) ? f.comp[i - w] : -1;
      if (left < 0 && up < 0) {
        std::int32_t id = static_cast<std::int32_t>(parent.size());
        parent.push_back(id);
        f.comp[i] = id;
      } else if (left >= 0 && up < 0) {
        f.comp[i] = find(left);
      } else if (left < 0) {
        f.comp[i] = find(up);
      } else {
        std::int32_t a = find(left), b = find(up);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
        f.comp[i] = std::min(a, b);
      }
    }
  }
  // flatten and renumber densely
  std::vector<std::int32_t> remap(parent.size(), -1);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < f.comp.size(); ++i) {
    if (f.comp[i] < 0) continue;
    std::int32_t r = find(f.comp[i]);
    if (remap[r] < 0) remap[r] = next++;
    f.comp[i] = remap[r];
  }
  f.component_count = next;
}

}  // namespace

BasinField classify(const NewtonMap& map, Window window, int width, int height,
                    double epsilon, int max_iter) {
  if (width < 2 || height < 2)
    throw Error(ErrorCode::InvalidArgument, "raster must be at least 2x2");
  double minsep = map.spec().min_separation();
  if (!(epsilon > 0.0) || epsilon >= 0.5 * minsep)
    throw Error(ErrorCode::InvalidArgument,
                "epsilon must be positive and below half the root separation");

  BasinField f;
  f.window = window;
  f.width = width;
  f.height = height;
  f.epsilon = epsilon;
  f.max_iter = max_iter;
  f.label.assign(static_cast<std::size_t>(width) * height, -1);
  f.iters.assign(f.label.size(), -1);

  for (const auto& r : map.spec().roots) {
    if (!window.contains(r.location))
      f.warnings.push_back("root outside the window: " + std::to_string(r.location.real()) +
                           "+" + std::to_string(r.location.imag()) + "i");
  }

  const auto& roots = map.spec().roots;
  const double eps2 = epsilon * epsilon;
  parallel_for(static_cast<std::size_t>(height), [&](std::size_t row) {
    int y = static_cast<int>(row);
    for (int x = 0; x < width; ++x) {
      SpherePoint z(f.pixel_center(x, y));
      for (int it = 0; it < max_iter; ++it) {
        if (z.finite()) {
          for (std::size_t k = 0; k < roots.size(); ++k) {
            if (std::norm(z.z - roots[k].location) < eps2) {
              f.label[f.index(x, y)] = static_cast<std::int16_t>(k);
              f.iters[f.index(x, y)] = static_cast<std::int16_t>(std::min(it, 32000));
              break;
            }
          }
          if (f.label[f.index(x, y)] >= 0) break;
        }
        z = map.eval(z);
      }
    }
  });

  label_components(f);
  return f;
}

BasinField classify(const NewtonMap& map, Window window, int width, int height) {
  return classify(map, window, width, height, 0.05 * map.spec().min_separation(), 512);
}

namespace {

// does the orbit of z converge to root k within the budget?
int capture_root(const NewtonMap& map, cplx z, double eps, int max_iter, int* steps = nullptr) {
  SpherePoint p(z);
  const auto& roots = map.spec().roots;
  for (int it = 0; it < max_iter; ++it) {
    if (p.finite()) {
      for (std::size_t k = 0; k < roots.size(); ++k) {
        if (std::abs(p.z - roots[k].location) < eps) {
          if (steps) *steps = it;
          return static_cast<int>(k);
        }
      }
    }
    p = map.eval(p);
  }
  return -1;
}

}  // namespace

std::vector<ComponentRecord> immediate_basins(BasinField& field, const NewtonMap& map) {
  const auto& spec = map.spec();

  for (int attempt = 0;; ++attempt) {
    bool need_refine = false;

    // root pixels must be decided
    for (int k = 0; k < spec.distinct_count(); ++k) {
      auto [x, y] = field.locate(spec.roots[k].location);
      if (x < 0) continue;  // root outside window: warned in classify
      if (field.label[field.index(x, y)] != k) need_refine = true;
    }
    // critical points converging to a root should sit on decided pixels
    for (const auto& c : map.critical_points()) {
      if (capture_root(map, c.location.z, field.epsilon, field.max_iter) < 0) continue;
      auto [x, y] = field.locate(c.location.z);
      if (x >= 0 && field.label[field.index(x, y)] < 0) need_refine = true;
    }
    if (!need_refine) break;
    if (attempt >= 2)
      throw Error(ErrorCode::ResolutionTooCoarse,
                  "root or critical pixel undecided after two refinements");
    field = classify(map, field.window, field.width * 2, field.height * 2, field.epsilon,
                     field.max_iter);
  }

  std::vector<ComponentRecord> out;
  for (int k = 0; k < spec.distinct_count(); ++k) {
    ComponentRecord rec;
    rec.basin_index = k;
    rec.immediate = true;
    auto [x, y] = field.locate(spec.roots[k].location);
    if (x < 0)
      throw Error(ErrorCode::WindowExcludesRoots,
                  "immediate basin of an out-of-window root is not rasterized");
    rec.id = field.comp[field.index(x, y)];
    rec.sample = spec.roots[k].location;

    // deg(f|_B) = 1 + sum of (local degree - 1) over critical points in B
    int extra = 0;
    for (const auto& c : map.critical_points()) {
      int root = capture_root(map, c.location.z, field.epsilon, field.max_iter);
      if (root != k) continue;
      auto [cx, cy] = field.locate(c.location.z);
      if (cx < 0) continue;
      if (field.comp[field.index(cx, cy)] == rec.id) extra += c.local_degree - 1;
    }
    rec.map_degree = 1 + extra;
    out.push_back(rec);
  }
  return out;
}

ComponentRecord component_of(const BasinField& field,
                             const std::vector<ComponentRecord>& immediates,
                             const NewtonMap& map, cplx z) {
  auto [x, y] = field.locate(z);
  if (x < 0 || field.label[field.index(x, y)] < 0)
    throw Error(ErrorCode::UndecidedPixel, "point is undecided or outside the window");
  std::int32_t id = field.comp[field.index(x, y)];
  for (const auto& rec : immediates)
    if (rec.id == id) return rec;

  ComponentRecord rec;
  rec.id = id;
  rec.basin_index = field.label[field.index(x, y)];
  rec.immediate = false;
  rec.sample = field.pixel_center(x, y);

  // orbit of the sample through component ids until an immediate one
  SpherePoint p(rec.sample);
  for (int hop = 0; hop < 64; ++hop) {
    p = map.eval(p);
    if (!p.finite()) break;
    auto [px, py] = field.locate(p.z);
    if (px < 0 || field.label[field.index(px, py)] < 0) break;
    std::int32_t next = field.comp[field.index(px, py)];
    rec.preimage_address.push_back(next);
    bool is_immediate = false;
    for (const auto& im : immediates)
      if (im.id == next) is_immediate = true;
    if (is_immediate) break;
  }
  return rec;
}

std::map<int, int> f_component_map(const BasinField& field, const NewtonMap& map) {
  // representative pixel per component: the fastest-captured pixel sits
  // deepest inside, away from the fractal boundary
  std::map<int, std::pair<int, int>> sample;
  std::map<int, int> best_iters;
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      std::int32_t id = field.comp[field.index(x, y)];
      if (id < 0) continue;
      int it = field.iters[field.index(x, y)];
      auto found = best_iters.find(id);
      if (found == best_iters.end() || it < found->second) {
        best_iters[id] = it;
        sample[id] = {x, y};
      }
    }
  }
  std::map<int, int> out;
  for (const auto& [id, px] : sample) {
    SpherePoint image = map.eval(SpherePoint(field.pixel_center(px.first, px.second)));
    if (!image.finite()) continue;
    auto [ix, iy] = field.locate(image.z);
    if (ix < 0) continue;
    std::int32_t target = field.comp[field.index(ix, iy)];
    if (target >= 0) out[id] = target;
  }
  return out;
}

PcfReport pcf_in_basins_check(const NewtonMap& map, double epsilon, int max_iter) {
  if (epsilon <= 0.0) epsilon = 0.05 * map.spec().min_separation();
  const double land_tol = std::max(map.merge_tol(), 1e-9);
  PcfReport rep;
  rep.accepted = true;
  for (const auto& c : map.critical_points()) {
    PcfOrbitRecord rec;
    rec.critical_point = c.location.z;
    rec.local_degree = c.local_degree;

    SpherePoint p(c.location.z);
    for (int it = 0; it < max_iter; ++it) {
      if (p.finite()) {
        for (int k = 0; k < map.spec().distinct_count(); ++k) {
          double dist = std::abs(p.z - map.spec().roots[k].location);
          if (dist < epsilon && rec.capture_steps < 0) {
            rec.capture_steps = it;
            rec.root_index = k;
            rec.converged_to_root = true;
          }
          if (dist < land_tol && rec.landing_steps < 0) rec.landing_steps = it;
        }
      }
      if (rec.landing_steps >= 0) break;
      if (rec.trace.size() < 16 && p.finite()) rec.trace.push_back(p.z);
      p = map.eval(p);
    }
    if (rec.converged_to_root && rec.landing_steps < 0) rep.accepted = false;
    rep.orbits.push_back(std::move(rec));
  }
  return rep;
}

void write_raster(const std::string& path, const BasinField& field) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  const char magic[8] = {'N', 'E', 'W', 'T', 'R', 'A', 'S', '1'};
  std::fwrite(magic, 1, 8, fp);
  double win[4] = {field.window.x0, field.window.x1, field.window.y0, field.window.y1};
  std::fwrite(win, sizeof(double), 4, fp);
  std::int32_t dims[2] = {field.width, field.height};
  std::fwrite(dims, sizeof(std::int32_t), 2, fp);
  std::fwrite(field.label.data(), sizeof(std::int16_t), field.label.size(), fp);
  std::fwrite(field.iters.data(), sizeof(std::int16_t), field.iters.size(), fp);
  std::fclose(fp);
}

BasinField read_raster(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  char magic[8];
  if (std::fread(magic, 1, 8, fp) != 8 || std::memcmp(magic, "NEWTRAS1", 8) != 0) {
    std::fclose(fp);
    throw Error(ErrorCode::ParseError, "bad raster magic in " + path);
  }
  BasinField f;
  double win[4];
  std::int32_t dims[2];
  if (std::fread(win, sizeof(double), 4, fp) != 4 ||
      std::fread(dims, sizeof(std::int32_t), 2, fp) != 2) {
    std::fclose(fp);
    throw Error(ErrorCode::ParseError, "truncated raster header in " + path);
  }
  f.window = {win[0], win[1], win[2], win[3]};
  f.width = dims[0];
  f.height = dims[1];
  std::size_t n = static_cast<std::size_t>(f.width) * f.height;
  f.label.resize(n);
  f.iters.resize(n);
  if (std::fread(f.label.data(), sizeof(std::int16_t), n, fp) != n ||
      std::fread(f.iters.data(), sizeof(std::int16_t), n, fp) != n) {
    std::fclose(fp);
    throw Error(ErrorCode::ParseError, "truncated raster body in " + path);
  }
  std::fclose(fp);
  label_components(f);
  return f;
}

}  // namespace newton
