#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ada/features.hpp"
#include "ada/game.hpp"
#include "ada/geometry.hpp"
#include "ada/proposals.hpp"

namespace ada {

// One training or test image after proposal generation and feature
// extraction. For training data the ground truth is present in `proposals`
// and `features.gt_index` points at it.
struct Example {
  std::string image_id;
  int class_id = 0;
  ProposalSet proposals;
  FeatureMatrix features;
  BoundingBox gt;

  std::size_t gt_index() const { return features.gt_index; }
};

struct Dataset {
  std::vector<Example> examples;
  ExtractorSpec extractor;

  std::size_t size() const { return examples.size(); }
  // Throws DataError when empty, misaligned, or of mixed dimension.
  void validate() const;
};

enum class ObjectiveKind { kAda, kSsvm, kSoftmax };
std::string to_string(ObjectiveKind kind);
ObjectiveKind parse_objective(const std::string& name);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.1;
  double adagrad_epsilon = 1e-8;
  std::size_t minibatch = 10;
  std::uint64_t seed = 7;
  double oracle_eps = 1e-6;
  // Stop once the epoch residual (ADA) or gradient (softmax) infinity-norm
  // falls to this value.
  double tolerance = 1e-6;

  double ssvm_lambda = 1e-3;
  int ssvm_rounds = 50;
  int ssvm_inner_iterations = 2000;
  double ssvm_step = 1.0;
  double ssvm_tolerance = 1e-4;

  double softmax_positive_iou = 0.7;

  unsigned jobs = 1;

  void validate() const;
};

struct TrainingMetadata {
  int epochs_run = 0;
  double final_gradient_norm = 0.0;
  std::uint64_t seed = 0;
  double lambda = 0.0;  // SSVM regularizer, 0 for other objectives
};

struct ThetaModel {
  Eigen::VectorXd theta;
  ObjectiveKind objective = ObjectiveKind::kAda;
  int class_id = 0;
  LossSpec loss;
  ExtractorSpec extractor;
  TrainingMetadata meta;

  bool operator==(const ThetaModel& other) const;
};

struct EpochStats {
  int epoch = 0;
  // ADA: infinity-norm of the mean per-example feature residual this epoch.
  // Softmax: infinity-norm of the full-batch gradient after the epoch.
  // SSVM: largest remaining constraint violation after the round.
  double gradient_norm = 0.0;
  double objective = 0.0;
};
using TrainObserver = std::function<void(const EpochStats&)>;

// sum_j p[j] rows[j] - rows[gt_index].
Eigen::VectorXd ada_gradient(const Eigen::VectorXd& p, const FeatureMatrix& features);

// Equilibrium of one example's game at theta, computed by double oracle
// with psi = theta'(phi - phi(y*)).
Equilibrium solve_example_game(const Eigen::VectorXd& theta, const Example& example,
                               const Eigen::MatrixXd& loss_matrix,
                               const DoubleOracleOptions& options = {});

Eigen::MatrixXd example_loss_matrix(const Example& example, const LossSpec& loss);

// Mean over the dataset of ada_gradient at theta, i.e. E_P[phi] - E_D[phi].
Eigen::VectorXd ada_residual(const Eigen::VectorXd& theta, const Dataset& data,
                             const std::vector<Eigen::MatrixXd>& loss_matrices,
                             const TrainConfig& config);

// Minimizes the dual objective over theta by AdaGrad with double-oracle
// equilibria supplying the gradient.
ThetaModel train_ada(const Dataset& data, const TrainConfig& config, const LossSpec& loss,
                     const TrainObserver& observer = {});

// Cutting-plane structured SVM: lambda ||theta|| + (1/N) sum xi_n under
// margin-rescaled constraints; restricted problems by subgradient descent.
ThetaModel train_ssvm(const Dataset& data, const TrainConfig& config, const LossSpec& loss,
                      const TrainObserver& observer = {});

// Conditional likelihood of the positive proposals (IoU >= threshold).
ThetaModel train_softmax(const Dataset& data, const TrainConfig& config, const LossSpec& loss,
                         const TrainObserver& observer = {});

// (1/N) sum_n [log sum_{pos} exp(theta'phi) - log sum_{all} exp(theta'phi)].
double softmax_objective(const Eigen::VectorXd& theta, const Dataset& data,
                         double positive_iou);

// lambda ||theta|| + (1/N) sum_n max(0, max_y loss(y*, y) - theta'(phi* - phi_y)).
double ssvm_objective(const Eigen::VectorXd& theta, const Dataset& data, const LossSpec& loss,
                      double lambda);

// Model files: versioned `key = value` text, one block per class model.
std::string format_models(const std::vector<ThetaModel>& models);
std::vector<ThetaModel> parse_models(const std::string& text, const std::string& context);
void save_model(const ThetaModel& model, const std::string& path);
ThetaModel load_model(const std::string& path);
void save_models(const std::vector<ThetaModel>& models, const std::string& path);
std::vector<ThetaModel> load_models(const std::string& path);

}  // namespace ada
