#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "newton/basin.hpp"

namespace newton {

/// Deterministic 8-bit RGB PNG writer (fixed zlib settings, no ancillary
/// chunks), so renders are byte-stable across runs.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

/// One hue per root, brightness decaying with capture time, undecided black.
std::vector<std::uint8_t> basin_colors(const BasinField& field, int root_count);

/// Minimal SVG 1.1 emitter with one <g> element per named layer.
class SvgWriter {
 public:
  SvgWriter(double view_x0, double view_y0, double view_w, double view_h, int pixels_wide);

  void begin_layer(const std::string& id);
  void end_layer();
  void polyline(const std::vector<cplx>& pts, const std::string& color, double width_px,
                bool closed = false);
  void circle(cplx center, double radius_px, const std::string& color, bool filled);
  void marker(cplx at, const std::string& color, const std::string& label = "");
  std::string finish();

 private:
  double sx(double x) const { return (x - x0_) * scale_; }
  double sy(double y) const { return (y1_ - y) * scale_; }  // y axis up

  double x0_, y0_, y1_, scale_;
  int width_px_, height_px_;
  std::ostringstream body_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace newton
