#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ada/dataset.hpp"
#include "ada/evaluation.hpp"
#include "ada/learning.hpp"

namespace ada {

// Ground-truth augmentation for the baselines: every selected proposal
// becomes an extra annotation of the same image.
enum class AugmentRegime { kThreshold, kTopK };

struct AugmentSetting {
  AugmentRegime regime = AugmentRegime::kTopK;
  double threshold = 0.99;  // kThreshold: keep proposals with IoU > threshold
  std::size_t k = 1;        // kTopK: keep the k best-ranked proposals

  std::string label() const;
};

// Expands each example into one example per selected box, the original
// annotation first. Top-k ranks by proposal score when scores exist, else by
// IoU with the ground truth (so k = 1 is the unaugmented set).
Dataset augment_dataset(const Dataset& data, const AugmentSetting& setting);

struct Experiment {
  // Per-class training sets (ground truth in the label space) and test sets.
  std::map<int, Dataset> train;
  std::map<int, Dataset> test;
  TrainConfig training;
  LossSpec loss;
  std::vector<double> thresholds{0.5, 0.7};
};

Experiment prepare_experiment(const Manifest& train, const Manifest& test,
                              const PipelineConfig& pipeline);

// Trains one model per class with `objective` on (optionally augmented)
// training data and evaluates on the test sets. Augmentation applies to the
// baselines only; ADA augments through its own game.
EvaluationReport run_method(const Experiment& experiment, ObjectiveKind objective,
                            const AugmentSetting& augment = {});

struct SweepRow {
  AugmentSetting setting;
  std::size_t training_examples = 0;
  EvaluationReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // thresholds first, then top-k
  SweepRow reference;          // threshold 0.99, effectively no augmentation
  std::size_t metric_index = 0;  // which evaluation threshold the summary uses

  double best() const;  // best sweep mAP at metric_index
};

SweepResult run_augmentation_sweep(const Experiment& experiment,
                                   const std::vector<double>& iou_thresholds,
                                   const std::vector<std::size_t>& top_k,
                                   std::size_t metric_index);
std::string format_sweep(const SweepResult& sweep);

}  // namespace ada
