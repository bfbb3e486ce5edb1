#include "ada/experiments.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <iomanip>

#include "ada/error.hpp"
#include "ada/text_format.hpp"

namespace ada {

std::string AugmentSetting::label() const {
  if (regime == AugmentRegime::kThreshold) return "IoU > " + text::format_double(threshold);
  return "top-" + std::to_string(k);
}

namespace {

std::vector<std::size_t> selected_boxes(const Example& ex, const AugmentSetting& setting) {
  const auto gt = ex.gt_index();
  std::vector<std::size_t> out{gt};
  if (setting.regime == AugmentRegime::kThreshold) {
    for (std::size_t i : filter_by_iou(ex.proposals, ex.gt, setting.threshold).indices)
      if (i != gt) out.push_back(i);
    return out;
  }
  if (setting.k < 1) throw UsageError("top-k augmentation needs k >= 1");
  std::vector<double> rank(ex.proposals.size());
  const auto& scores = ex.proposals.scores();
  for (std::size_t i = 0; i < rank.size(); ++i)
    rank[i] = scores ? (*scores)[i] : iou(ex.proposals[i], ex.gt);
  std::vector<std::size_t> order(rank.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rank[a] > rank[b]; });
  // The annotation itself always stays; it takes the first slot.
  for (std::size_t i : order) {
    if (out.size() >= setting.k) break;
    if (i != gt) out.push_back(i);
  }
  return out;
}

}  // namespace

Dataset augment_dataset(const Dataset& data, const AugmentSetting& setting) {
  Dataset out;
  out.extractor = data.extractor;
  for (const auto& ex : data.examples) {
    const auto chosen = selected_boxes(ex, setting);
    for (std::size_t n = 0; n < chosen.size(); ++n) {
      Example copy = ex;
      if (n > 0) copy.image_id += "#" + std::to_string(n);
      copy.gt = ex.proposals[chosen[n]];
      copy.features.gt_index = chosen[n];
      out.examples.push_back(std::move(copy));
    }
  }
  return out;
}

Experiment prepare_experiment(const Manifest& train, const Manifest& test,
                              const PipelineConfig& pipeline) {
  Experiment ex;
  for (int cls : class_ids(train)) {
    ex.train.emplace(cls, build_dataset(train, pipeline, true, cls));
    ex.test.emplace(cls, build_dataset(test, pipeline, false, cls));
  }
  return ex;
}

EvaluationReport run_method(const Experiment& ex, ObjectiveKind objective,
                            const AugmentSetting& augment) {
  std::vector<PredictionRecord> predictions;
  std::vector<std::pair<std::string, LabeledBox>> gts;
  DoubleOracleOptions oracle;
  oracle.eps = ex.training.oracle_eps;
  for (const auto& [cls, base] : ex.train) {
    ThetaModel model;
    switch (objective) {
      case ObjectiveKind::kAda:
        model = train_ada(base, ex.training, ex.loss);
        break;
      case ObjectiveKind::kSsvm:
        model = train_ssvm(augment_dataset(base, augment), ex.training, ex.loss);
        break;
      case ObjectiveKind::kSoftmax:
        model = train_softmax(augment_dataset(base, augment), ex.training, ex.loss);
        break;
    }
    const auto test = ex.test.find(cls);
    if (test == ex.test.end())
      throw DataError("no test images for class " + std::to_string(cls));
    for (const auto& e : test->second.examples) {
      predictions.push_back(predict(model, e, oracle));
      gts.push_back({e.image_id, {e.class_id, e.gt}});
    }
  }
  return evaluate(predictions, gts, ex.thresholds);
}

double SweepResult::best() const {
  if (rows.empty()) throw DataError("empty sweep");
  double best = rows.front().report.mean.at(metric_index);
  for (const auto& r : rows) best = std::max(best, r.report.mean.at(metric_index));
  return best;
}

SweepResult run_augmentation_sweep(const Experiment& ex, const std::vector<double>& iou_thresholds,
                                   const std::vector<std::size_t>& top_k,
                                   std::size_t metric_index) {
  if (metric_index >= ex.thresholds.size()) throw UsageError("metric index out of range");
  std::vector<AugmentSetting> settings;
  for (double t : iou_thresholds) settings.push_back({AugmentRegime::kThreshold, t, 1});
  for (std::size_t k : top_k) settings.push_back({AugmentRegime::kTopK, 0.0, k});

  auto run = [&](const AugmentSetting& s) {
    SweepRow row;
    row.setting = s;
    for (const auto& [cls, data] : ex.train) row.training_examples += augment_dataset(data, s).size();
    row.report = run_method(ex, ObjectiveKind::kSsvm, s);
    return row;
  };
  SweepResult out;
  out.metric_index = metric_index;
  for (const auto& s : settings) out.rows.push_back(run(s));
  out.reference = run({AugmentRegime::kThreshold, 0.99, 1});
  return out;
}

std::string format_sweep(const SweepResult& sweep) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "setting" << std::right << std::setw(10) << "examples";
  const auto& thresholds = sweep.reference.report.thresholds;
  for (double t : thresholds) out << std::setw(12) << ("mAP@" + text::format_double(t));
  out << "\n";
  auto line = [&](const SweepRow& r) {
    out << std::left << std::setw(12) << r.setting.label() << std::right << std::setw(10)
        << r.training_examples;
    for (double m : r.report.mean) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(1) << 100.0 * m;
      out << std::setw(12) << cell.str();
    }
    out << "\n";
  };
  for (const auto& r : sweep.rows) line(r);
  line(sweep.reference);
  return out.str();
}

}  // namespace ada
