#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ada/geometry.hpp"
#include "ada/image.hpp"

namespace ada {

struct SyntheticConfig {
  std::size_t count = 50;
  int width = 48;
  int height = 48;
  int classes = 3;
  std::uint64_t seed = 7;
  // Object side lengths are drawn from {min_size, min_size + size_step, ...,
  // max_size}.
  int min_size = 12;
  int max_size = 28;
  int size_step = 4;
  // Annotation noise: each gt coordinate moves by a uniform draw from
  // [-a, a] with a = noise_pixels + noise_fraction * (box side along that axis).
  double noise_pixels = 0.0;
  double noise_fraction = 0.0;

  void validate() const;
};

struct SyntheticImage {
  std::string image_id;
  int class_id = 0;
  Image image;
  BoundingBox true_box;
  BoundingBox annotated_box;  // true_box after annotation noise
};

// Deterministic in (config, index); images are independent of noise settings.
SyntheticImage generate_synthetic_image(const SyntheticConfig& config, std::size_t index);
std::vector<SyntheticImage> generate_synthetic(const SyntheticConfig& config);

}  // namespace ada
