#include "ada/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "ada/error.hpp"

namespace ada {

void SyntheticConfig::validate() const {
  if (count < 1) throw UsageError("synthetic corpus needs at least one image");
  if (classes < 1) throw UsageError("synthetic corpus needs at least one class");
  if (min_size < 2 || max_size < min_size || size_step < 1)
    throw UsageError("bad synthetic object size range");
  if (max_size > width || max_size > height)
    throw UsageError("synthetic objects do not fit in the image");
  if (noise_pixels < 0 || noise_fraction < 0) throw UsageError("noise must be nonnegative");
}

namespace {

// Base colors per class family; objects are brighter than the background so
// their grayscale histograms separate.
constexpr std::array<std::array<int, 3>, 6> kPalette{{
    {{250, 190, 150}},
    {{150, 250, 190}},
    {{190, 150, 250}},
    {{250, 250, 140}},
    {{140, 240, 250}},
    {{250, 160, 230}},
}};

bool inside_shape(int shape, double px, double py, double x0, double y0, double w, double h) {
  const double u = (px - x0) / w, v = (py - y0) / h;  // unit square coordinates
  if (u < 0 || u > 1 || v < 0 || v > 1) return false;
  switch (shape) {
    case 0:  // rectangle
      return true;
    case 1: {  // ellipse
      const double du = u - 0.5, dv = v - 0.5;
      return du * du + dv * dv <= 0.25;
    }
    default:  // triangle: apex top-center, base along the bottom
      return std::abs(u - 0.5) <= 0.5 * v;
  }
}

}  // namespace

SyntheticImage generate_synthetic_image(const SyntheticConfig& config, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  std::mt19937_64 rng(seq);
  auto uniform_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  const int class_id = static_cast<int>(index % static_cast<std::size_t>(config.classes));
  const int steps = (config.max_size - config.min_size) / config.size_step;
  const int w = config.min_size + config.size_step * uniform_int(0, steps);
  const int h = config.min_size + config.size_step * uniform_int(0, steps);
  const int x0 = uniform_int(0, config.width - w);
  const int y0 = uniform_int(0, config.height - h);

  Image img(config.width, config.height);
  // Textured background: diagonal stripes plus per-pixel noise, gray 50..120.
  const double phase = uniform(0, 6.283185307179586);
  const double freq = uniform(0.3, 0.8);
  for (int y = 0; y < config.height; ++y) {
    for (int x = 0; x < config.width; ++x) {
      const double stripe = 20.0 * std::sin(freq * (x + y) + phase);
      const double base = 85.0 + stripe + uniform(-15.0, 15.0);
      auto* p = img.pixel(x, y);
      for (int c = 0; c < 3; ++c)
        p[c] = static_cast<std::uint8_t>(std::clamp(base + uniform(-8.0, 8.0), 0.0, 255.0));
    }
  }
  const int shape = class_id % 3;
  const auto& color = kPalette[static_cast<std::size_t>(class_id) % kPalette.size()];
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      if (!inside_shape(shape, x + 0.5, y + 0.5, x0, y0, w, h)) continue;
      auto* p = img.pixel(x, y);
      for (int c = 0; c < 3; ++c)
        p[c] = static_cast<std::uint8_t>(std::clamp(color[c] + uniform(-5.0, 5.0), 0.0, 255.0));
    }
  }

  const BoundingBox truth(x0, y0, x0 + w, y0 + h, class_id);
  BoundingBox annotated = truth;
  const double ax = config.noise_pixels + config.noise_fraction * w;
  const double ay = config.noise_pixels + config.noise_fraction * h;
  if (ax > 0 || ay > 0) {
    // Redraw until the jittered box stays valid inside the image.
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double nx0 = std::clamp(x0 + uniform(-ax, ax), 0.0, double(config.width));
      const double ny0 = std::clamp(y0 + uniform(-ay, ay), 0.0, double(config.height));
      const double nx1 = std::clamp(x0 + w + uniform(-ax, ax), 0.0, double(config.width));
      const double ny1 = std::clamp(y0 + h + uniform(-ay, ay), 0.0, double(config.height));
      if (nx0 < nx1 && ny0 < ny1) {
        annotated = BoundingBox(nx0, ny0, nx1, ny1, class_id);
        break;
      }
    }
  }
  char id[32];
  std::snprintf(id, sizeof(id), "img_%05zu", index);
  return {id, class_id, std::move(img), truth, annotated};
}

std::vector<SyntheticImage> generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  std::vector<SyntheticImage> out;
  out.reserve(config.count);
  for (std::size_t i = 0; i < config.count; ++i) out.push_back(generate_synthetic_image(config, i));
  return out;
}

}  // namespace ada
