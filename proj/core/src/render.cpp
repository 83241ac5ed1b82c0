#include "newton/render.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <iomanip>

#include "newton/errors.hpp"

namespace newton {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back((v >> 24) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back(v & 0xff);
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  std::uint32_t crc = crc32(0, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, crc);
}

}  // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
    throw Error(ErrorCode::InvalidArgument, "rgb buffer size mismatch");

  // raw scanlines with filter byte 0
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(height) * (width * 3 + 1));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), rgb.begin() + static_cast<std::size_t>(y) * width * 3,
               rgb.begin() + static_cast<std::size_t>(y + 1) * width * 3);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw Error(ErrorCode::InvalidArgument, "deflate failed");
  compressed.resize(bound);

  std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type RGB
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // no interlace
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", compressed);
  put_chunk(png, "IEND", {});

  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::fwrite(png.data(), 1, png.size(), fp);
  std::fclose(fp);
}

namespace {

void hsv_to_rgb(double h, double s, double v, std::uint8_t* out) {
  double r = 0, g = 0, b = 0;
  int i = static_cast<int>(std::floor(h * 6.0)) % 6;
  double f = h * 6.0 - std::floor(h * 6.0);
  double p = v * (1 - s), q = v * (1 - f * s), t = v * (1 - (1 - f) * s);
  switch (i) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  out[0] = static_cast<std::uint8_t>(std::lround(255 * r));
  out[1] = static_cast<std::uint8_t>(std::lround(255 * g));
  out[2] = static_cast<std::uint8_t>(std::lround(255 * b));
}

}  // namespace

std::vector<std::uint8_t> basin_colors(const BasinField& field, int root_count) {
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(field.width) * field.height * 3, 0);
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      std::size_t i = field.index(x, y);
      // image rows top-down, raster rows bottom-up
      std::size_t o = (static_cast<std::size_t>(field.height - 1 - y) * field.width + x) * 3;
      int k = field.label[i];
      if (k < 0) continue;  // undecided: black
      double hue = root_count > 0 ? static_cast<double>(k) / root_count : 0.0;
      double fade = std::min(1.0, field.iters[i] / 48.0);
      hsv_to_rgb(hue, 0.85, 1.0 - 0.7 * fade, &rgb[o]);
    }
  }
  return rgb;
}

SvgWriter::SvgWriter(double view_x0, double view_y0, double view_w, double view_h,
                     int pixels_wide)
    : x0_(view_x0), y0_(view_y0), y1_(view_y0 + view_h),
      scale_(pixels_wide / view_w), width_px_(pixels_wide),
      height_px_(static_cast<int>(std::lround(pixels_wide * view_h / view_w))) {
  body_ << std::setprecision(10);
}

void SvgWriter::begin_layer(const std::string& id) {
  body_ << "  <g id=\"" << id << "\" fill=\"none\">\n";
}

void SvgWriter::end_layer() { body_ << "  </g>\n"; }

void SvgWriter::polyline(const std::vector<cplx>& pts, const std::string& color,
                         double width_px, bool closed) {
  if (pts.empty()) return;
  body_ << "    <" << (closed ? "polygon" : "polyline") << " points=\"";
  for (const auto& p : pts) body_ << sx(p.real()) << "," << sy(p.imag()) << " ";
  body_ << "\" stroke=\"" << color << "\" stroke-width=\"" << width_px << "\"/>\n";
}

void SvgWriter::circle(cplx center, double radius_px, const std::string& color, bool filled) {
  body_ << "    <circle cx=\"" << sx(center.real()) << "\" cy=\"" << sy(center.imag())
        << "\" r=\"" << radius_px << "\" " << (filled ? "fill=\"" : "stroke=\"") << color
        << "\"/>\n";
}

void SvgWriter::marker(cplx at, const std::string& color, const std::string& label) {
  circle(at, 3.0, color, true);
  if (!label.empty()) {
    body_ << "    <text x=\"" << sx(at.real()) + 5 << "\" y=\"" << sy(at.imag()) - 5
          << "\" fill=\"" << color << "\" font-size=\"11\">" << label << "</text>\n";
  }
}

std::string SvgWriter::finish() {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width_px_
      << "\" height=\"" << height_px_ << "\" viewBox=\"0 0 " << width_px_ << " " << height_px_
      << "\">\n"
      << body_.str() << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::fwrite(content.data(), 1, content.size(), fp);
  std::fclose(fp);
}

}  // namespace newton
