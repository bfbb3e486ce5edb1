#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ada/geometry.hpp"

namespace ada {

// Discretized label space for one image: an ordered list of distinct boxes.
class ProposalSet {
 public:
  // Throws DataError if `boxes` is empty, contains coordinate duplicates, or
  // `scores` (when given) has the wrong length or negative entries.
  ProposalSet(std::string image_id, std::vector<BoundingBox> boxes,
              std::optional<std::vector<double>> scores = std::nullopt);

  // Drops exact-coordinate duplicates (first occurrence wins) before
  // construction. `dropped`, when non-null, receives the number removed.
  static ProposalSet deduplicated(std::string image_id, std::vector<BoundingBox> boxes,
                                  std::optional<std::vector<double>> scores = std::nullopt,
                                  std::size_t* dropped = nullptr);

  const std::string& image_id() const { return image_id_; }
  const std::vector<BoundingBox>& boxes() const { return boxes_; }
  const std::optional<std::vector<double>>& scores() const { return scores_; }
  std::size_t size() const { return boxes_.size(); }
  const BoundingBox& operator[](std::size_t i) const { return boxes_[i]; }

  std::optional<std::size_t> find(const BoundingBox& box) const;

  // Returns the index of `box`, appending it first if absent. An appended
  // box gets score 0 when scores are present.
  std::size_t ensure_contains(const BoundingBox& box);

 private:
  std::string image_id_;
  std::vector<BoundingBox> boxes_;
  std::optional<std::vector<double>> scores_;
};

enum class ProposalGenerator { kGrid, kJitter, kFile };

struct ProposalConfig {
  ProposalGenerator generator = ProposalGenerator::kGrid;
  std::size_t k = 250;

  // Grid: window sizes (width, height) in pixels, visited in order.
  std::vector<std::pair<double, double>> scales{{16, 16}, {24, 24}, {32, 32}};
  double stride_x = 8;
  double stride_y = 8;

  // Jitter: center translation drawn from [-max_translation, max_translation]
  // pixels, width/height factors from [1 - max_scale, 1 + max_scale].
  double max_translation = 5;
  double max_scale = 0.0;
  std::size_t samples = 20;

  std::uint64_t rng_seed = 0;

  void validate() const;
};

ProposalSet grid_proposals(double image_width, double image_height,
                           const ProposalConfig& config, std::string image_id = {});

// Element 0 is always `gt`. When `bounds` (width, height) is given, samples
// are clipped to the image; samples that collapse after clipping are redrawn
// from the gt.
ProposalSet jitter_proposals(const BoundingBox& gt, const ProposalConfig& config,
                             std::optional<std::pair<double, double>> bounds = std::nullopt,
                             std::string image_id = {});

struct LoadedProposals {
  ProposalSet proposals;
  std::size_t duplicates_dropped = 0;
};

// Text format: one `x_min,y_min,x_max,y_max[,score]` per line, `#` comments.
LoadedProposals load_proposals(const std::string& path, std::string image_id = {});
std::string format_proposals(const ProposalSet& proposals);

// Boxes with iou(box, gt) > threshold, in input order. The result may be
// empty, so it is returned as a plain vector of indices plus boxes.
struct FilteredProposals {
  std::vector<std::size_t> indices;
  std::vector<BoundingBox> boxes;
};
FilteredProposals filter_by_iou(const ProposalSet& proposals, const BoundingBox& gt,
                                double threshold);

}  // namespace ada
