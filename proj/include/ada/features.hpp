#pragma once

#include <Eigen/Dense>
#include <string>

#include "ada/image.hpp"
#include "ada/proposals.hpp"

namespace ada {

// Per-proposal feature rows phi(y, x), aligned by index with a ProposalSet.
// Row `gt_index` holds the ground-truth feature phi(y*, x).
struct FeatureMatrix {
  std::string image_id;
  Eigen::MatrixXd rows;  // proposals x dim
  std::size_t gt_index = 0;

  Eigen::Index dim() const { return rows.cols(); }
  Eigen::Index size() const { return rows.rows(); }

  // Throws DataError on non-finite entries or an out-of-range gt_index.
  void validate() const;
};

enum class ExtractorKind {
  kGeometry,   // box geometry only, D = 6
  kHistogram,  // grayscale histogram of the box crop, D = bins
  kContext,    // box histogram, surrounding-ring histogram, then geometry; D = 2 * bins + 6
  kFile,       // precomputed rows, see load_features
};

struct ExtractorSpec {
  ExtractorKind kind = ExtractorKind::kContext;
  int bins = 8;
  std::string path;  // kFile only
  bool normalize = true;

  void validate() const;
  // Output dimension; kFile dimensions are only known from the file.
  int dim() const;
  bool operator==(const ExtractorSpec&) const = default;
};

std::string to_string(ExtractorKind kind);
ExtractorKind parse_extractor_kind(const std::string& name);

inline constexpr int kGeometryDim = 6;

// Deterministic feature rows for every proposal. Rejects kFile and boxes
// that extend beyond the image. Does not normalize; see normalize_rows.
FeatureMatrix extract_features(const Image& image, const ProposalSet& proposals,
                               const ExtractorSpec& spec);

// Header `dim=<D>` then one comma-separated row per proposal.
FeatureMatrix load_features(const std::string& path, const ProposalSet& proposals);
std::string format_features(const FeatureMatrix& features);

// psi[i] = theta . (rows[i] - rows[reference]); psi[reference] is exactly 0.
Eigen::VectorXd potentials(const Eigen::VectorXd& theta, const FeatureMatrix& features);
Eigen::VectorXd potentials(const Eigen::VectorXd& theta, const FeatureMatrix& features,
                           std::size_t reference);

// theta . rows[i] for every proposal.
Eigen::VectorXd linear_scores(const Eigen::VectorXd& theta, const FeatureMatrix& features);

// Scales each nonzero row to unit Euclidean norm.
FeatureMatrix normalize_rows(FeatureMatrix features);

}  // namespace ada
