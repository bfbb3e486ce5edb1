#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ada/game.hpp"
#include "ada/geometry.hpp"
#include "ada/learning.hpp"

namespace ada {

struct PredictionRecord {
  std::string image_id;
  int class_id = 0;
  BoundingBox box{0, 0, 1, 1};
  std::size_t index = 0;  // position in the image's proposal set
  // Higher means more confident. ADA: -v with the predicted box as the
  // potential reference; SSVM and softmax: max theta'phi.
  double score = 0.0;
  ObjectiveKind method = ObjectiveKind::kAda;
  Eigen::VectorXd distribution;  // ADA: f, softmax: P(y|x); empty for SSVM
  Eigen::VectorXd adversary;     // ADA only: p
};

// Throws DataError naming expected and actual D when they differ.
void check_model_dim(const ThetaModel& model, const Example& example);

// Equilibrium of the test-time game, argmax f with the lowest index on ties.
PredictionRecord predict_ada(const ThetaModel& model, const Example& example,
                             const DoubleOracleOptions& options = {});
PredictionRecord predict_ssvm(const ThetaModel& model, const Example& example);
// Bayes decision: argmin_y sum_y' P(y'|x) loss(y, y').
PredictionRecord predict_softmax(const ThetaModel& model, const Example& example);
PredictionRecord predict(const ThetaModel& model, const Example& example,
                         const DoubleOracleOptions& options = {});

// Runs every class model and keeps the prediction with the highest score
// (earliest model on ties).
PredictionRecord detect(std::span<const ThetaModel> models, const Example& example,
                        const DoubleOracleOptions& options = {});

// Fraction of aligned pairs with iou(prediction, gt) > alpha.
double accuracy_at_iou(std::span<const PredictionRecord> predictions,
                       std::span<const BoundingBox> gts, double alpha);
double accuracy_at_iou(std::span<const BoundingBox> predictions,
                       std::span<const BoundingBox> gts, double alpha);

double mean_ap(const std::map<int, double>& per_class);

struct LabeledBox {
  int class_id = 0;
  BoundingBox box{0, 0, 1, 1};
};

// Class must match and IoU must exceed alpha.
double detection_accuracy(std::span<const PredictionRecord> predictions,
                          std::span<const LabeledBox> gts, double alpha);

// Predictions file: one `image_id, class_id, x_min, y_min, x_max, y_max, score`
// line per image; `#` lines are comments.
std::string format_predictions(std::span<const PredictionRecord> predictions);
std::vector<PredictionRecord> parse_predictions(const std::string& text,
                                                const std::string& context);
void save_predictions(std::span<const PredictionRecord> predictions, const std::string& path);
std::vector<PredictionRecord> load_predictions(const std::string& path);

struct AugmentationRecord {
  std::string image_id;
  std::vector<std::pair<BoundingBox, double>> boxes;  // adversary support, weights sum to 1

  bool operator==(const AugmentationRecord&) const = default;
};

// Training-time game (potentials relative to the ground truth) restricted to
// the adversary's support.
AugmentationRecord augmentation_record(const ThetaModel& model, const Example& example,
                                       const DoubleOracleOptions& options = {});

struct AugmentationExport {
  std::vector<AugmentationRecord> records;
  std::vector<std::pair<std::string, std::string>> failures;  // image id, message
  bool partial() const { return !failures.empty(); }
  double mean_support() const;
};

AugmentationExport compute_augmentation(const ThetaModel& model, const Dataset& data,
                                        const DoubleOracleOptions& options = {},
                                        unsigned jobs = 1);
// Writes the records; a partial export carries a `partial = true` line and
// one `failed = id: message` line per failure.
AugmentationExport export_augmentation(const ThetaModel& model, const Dataset& data,
                                       const std::string& path,
                                       const DoubleOracleOptions& options = {},
                                       unsigned jobs = 1);
std::string format_augmentation(const AugmentationExport& out);
AugmentationExport parse_augmentation(const std::string& text, const std::string& context);

struct EvaluationReport {
  std::vector<double> thresholds;
  // per class, one accuracy per threshold
  std::map<int, std::vector<double>> per_class;
  std::map<int, std::size_t> counts;
  std::vector<double> mean;  // mean_ap per threshold

  std::string format_table(const std::string& title = "accuracy (%)") const;
  std::string to_json() const;
};

// One section per threshold: a row per method, a column per class, then mAP.
std::string format_comparison(const std::vector<std::pair<std::string, EvaluationReport>>& rows);

// Aligns predictions with ground truths by image id. Throws DataError listing
// every id present on one side only.
EvaluationReport evaluate(std::span<const PredictionRecord> predictions,
                          const std::vector<std::pair<std::string, LabeledBox>>& gts,
                          const std::vector<double>& thresholds);

}  // namespace ada
