#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "ada/geometry.hpp"

namespace ada::testing {

inline BoundingBox random_box(std::mt19937_64& rng, double extent = 100.0) {
  std::uniform_real_distribution<double> pos(0.0, extent);
  double x0 = pos(rng), x1 = pos(rng), y0 = pos(rng), y1 = pos(rng);
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  return BoundingBox(x0, y0, x1 + 0.5, y1 + 0.5);
}

// Boxes on an integer lattice so exact coincidences and disjointness occur.
inline BoundingBox random_lattice_box(std::mt19937_64& rng, int extent = 12) {
  std::uniform_int_distribution<int> pos(0, extent);
  int x0 = pos(rng), x1 = pos(rng), y0 = pos(rng), y1 = pos(rng);
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  return BoundingBox(x0, y0, x1 + 1, y1 + 1);
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ada_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace ada::testing
