#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ada {

// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h);

  std::uint8_t* pixel(int x, int y) { return &rgb[3 * (static_cast<std::size_t>(y) * width + x)]; }
  const std::uint8_t* pixel(int x, int y) const {
    return &rgb[3 * (static_cast<std::size_t>(y) * width + x)];
  }
  double gray(int x, int y) const {
    const auto* p = pixel(x, y);
    return (static_cast<double>(p[0]) + p[1] + p[2]) / 3.0;
  }
  bool empty() const { return width <= 0 || height <= 0; }
  bool operator==(const Image&) const = default;
};

// Reads plain (P3) or binary (P6) portable pixmaps with maxval <= 255.
Image read_ppm(const std::string& path);
Image parse_ppm(const std::string& bytes, const std::string& context = "ppm");

// Writes binary P6.
std::string encode_ppm(const Image& image);
void write_ppm(const std::string& path, const Image& image);

}  // namespace ada
