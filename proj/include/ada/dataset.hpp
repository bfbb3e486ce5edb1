#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ada/features.hpp"
#include "ada/learning.hpp"
#include "ada/proposals.hpp"
#include "ada/synthetic.hpp"

namespace ada {

struct ManifestEntry {
  std::string image_id;
  int class_id = 0;
  std::string image_path;     // portable pixmap, or
  std::string feature_path;   // precomputed feature rows
  std::string proposal_path;  // optional; required with feature_path
  BoundingBox gt{0, 0, 1, 1};
  std::optional<BoundingBox> true_box;  // synthetic corpora record the noise-free box
};

// Text file: version line, `key = value` corpus metadata, then one
// `[image] ... [end]` block per entry. Relative paths resolve against the
// manifest's directory.
struct Manifest {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ManifestEntry> entries;
  std::string base_dir;

  std::string resolve(const std::string& path) const;
  // Unique ids, exactly one of image/feature path, and (when `check_files`)
  // every referenced file exists.
  void validate(bool check_files = true) const;
};

Manifest parse_manifest(const std::string& text, const std::string& context,
                        const std::string& base_dir);
Manifest load_manifest(const std::string& path);
std::string format_manifest(const Manifest& manifest);

// Writes `count` images plus manifest.txt under `directory`; returns the
// manifest. Creates the directory if needed.
Manifest write_synthetic_corpus(const SyntheticConfig& config, const std::string& directory);

struct PipelineConfig {
  ProposalConfig proposals;
  ExtractorSpec extractor;
  unsigned jobs = 1;
};

// Default grid tuned to the synthetic corpus: side lengths {12, 20, 28},
// stride 6.
ProposalConfig default_synthetic_proposals();

// Builds proposals and features for every entry (optionally one class only).
// With `training`, the ground truth is appended to the label space when
// absent and features.gt_index points at it; otherwise the label space is
// the raw proposal set and gt is carried for evaluation only.
Dataset build_dataset(const Manifest& manifest, const PipelineConfig& config, bool training,
                      std::optional<int> class_filter = std::nullopt);

std::vector<int> class_ids(const Manifest& manifest);

}  // namespace ada
