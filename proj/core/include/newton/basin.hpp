#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "newton/newton_map.hpp"

namespace newton {

struct Window {
  double x0 = -2.0, x1 = 2.0, y0 = -2.0, y1 = 2.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(cplx z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
};

/// Escape-time raster of the root basins: per pixel the index of the
/// captured root (or -1), the capture time, and a 4-connected component id.
struct BasinField {
  Window window;
  int width = 0, height = 0;
  double epsilon = 0.0;
  int max_iter = 0;
  std::vector<std::int16_t> label;   // root index or -1 (undecided)
  std::vector<std::int16_t> iters;   // iterations to epsilon-capture
  std::vector<std::int32_t> comp;    // component id or -1
  int component_count = 0;
  std::vector<std::string> warnings;

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  cplx pixel_center(int x, int y) const {
    return {window.x0 + (x + 0.5) * window.width() / width,
            window.y0 + (y + 0.5) * window.height() / height};
  }
  /// Pixel containing z, or {-1,-1} when outside the window.
  std::pair<int, int> locate(cplx z) const;
};

struct ComponentRecord {
  int id = -1;
  int basin_index = -1;
  bool immediate = false;
  int map_degree = 0;              // d_B for immediate components
  cplx sample;                     // interior sample point
  std::vector<int> preimage_address;  // component ids along the orbit, empty if immediate
};

/// Iterates every pixel center to epsilon-capture. epsilon must be below
/// half the minimal root separation. Roots outside the window produce a
/// warning entry, not a failure.
BasinField classify(const NewtonMap& map, Window window, int width, int height,
                    double epsilon, int max_iter);

/// Convenience defaults: epsilon = 0.05 * min separation, max_iter = 512.
BasinField classify(const NewtonMap& map, Window window, int width, int height);

/// The d root-containing components, flagged immediate, with deg(f|_B)
/// computed from critical-point membership (Riemann-Hurwitz on a disk).
/// Re-classifies at doubled resolution (up to twice) when a critical point
/// lands on an undecided pixel.
std::vector<ComponentRecord> immediate_basins(BasinField& field, const NewtonMap& map);

/// Component lookup for a decided point; throws UndecidedPixel otherwise.
ComponentRecord component_of(const BasinField& field,
                             const std::vector<ComponentRecord>& immediates,
                             const NewtonMap& map, cplx z);

/// The induced map on component ids: each component maps into the component
/// of the image of its sample point.
std::map<int, int> f_component_map(const BasinField& field, const NewtonMap& map);

struct PcfOrbitRecord {
  cplx critical_point;
  int local_degree = 2;
  bool converged_to_root = false;
  int root_index = -1;
  int capture_steps = -1;  // first step within epsilon of the root
  int landing_steps = -1;  // first step within merge tolerance, -1 if never
  std::vector<cplx> trace; // short orbit prefix for diagnostics
};

struct PcfReport {
  bool accepted = false;
  std::vector<PcfOrbitRecord> orbits;
};

/// Post-critically-finite-in-the-basins check: every critical point whose
/// orbit is captured by a root must land on it (within merge tolerance) in
/// finitely many steps and stay fixed.
PcfReport pcf_in_basins_check(const NewtonMap& map, double epsilon = 0.0, int max_iter = 512);

/// Binary raster format shared by the basin and puzzle rasters:
/// magic "NEWTRAS1", window as 4 doubles, width/height as int32, then
/// row-major int16 labels and int16 iteration counts.
void write_raster(const std::string& path, const BasinField& field);
BasinField read_raster(const std::string& path);

}  // namespace newton
