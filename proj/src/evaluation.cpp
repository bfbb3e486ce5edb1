#include "ada/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "ada/error.hpp"
#include "ada/parallel.hpp"
#include "ada/text_format.hpp"

namespace ada {

void check_model_dim(const ThetaModel& model, const Example& example) {
  const auto expected = model.theta.size();
  const auto actual = static_cast<Eigen::Index>(example.features.dim());
  if (expected != actual)
    throw DataError("image '" + example.image_id + "': model expects D=" +
                    std::to_string(expected) + " but features have D=" + std::to_string(actual));
}

namespace {

void require_objective(const ThetaModel& model, ObjectiveKind kind) {
  if (model.objective != kind)
    throw UsageError("expected a " + to_string(kind) + " model, got " + to_string(model.objective));
}

std::size_t first_argmax(const Eigen::VectorXd& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  return best;
}

std::size_t first_argmin(const Eigen::VectorXd& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] < v[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  return best;
}

PredictionRecord base_record(const ThetaModel& model, const Example& example, std::size_t index,
                             double score) {
  PredictionRecord r;
  r.image_id = example.image_id;
  r.class_id = model.class_id;
  r.box = example.proposals.boxes()[index];
  r.index = index;
  r.score = score;
  r.method = model.objective;
  return r;
}

}  // namespace

PredictionRecord predict_ada(const ThetaModel& model, const Example& example,
                             const DoubleOracleOptions& options) {
  require_objective(model, ObjectiveKind::kAda);
  check_model_dim(model, example);
  // The ground truth is unknown at test time. Potentials are taken relative to
  // proposal 0; a constant shift of psi leaves the equilibrium unchanged.
  const Eigen::VectorXd psi = potentials(model.theta, example.features, 0);
  const auto loss = example_loss_matrix(example, model.loss);
  Equilibrium eq;
  try {
    eq = double_oracle(loss, psi, options);
  } catch (const SolverError& e) {
    throw SolverError("image '" + example.image_id + "': " + e.what());
  }
  // LP solutions carry rounding noise, so near-equal probabilities count as
  // ties and go to the lowest index.
  const double top = eq.f.maxCoeff();
  std::size_t best = 0;
  while (eq.f[static_cast<Eigen::Index>(best)] < top - 1e-9) ++best;
  // Value with the predicted box as reference: v - psi(best).
  const double score = -(eq.value - psi[static_cast<Eigen::Index>(best)]);
  auto r = base_record(model, example, best, score);
  r.distribution = eq.f;
  r.adversary = eq.p;
  return r;
}

PredictionRecord predict_ssvm(const ThetaModel& model, const Example& example) {
  require_objective(model, ObjectiveKind::kSsvm);
  check_model_dim(model, example);
  const Eigen::VectorXd scores = linear_scores(model.theta, example.features);
  const std::size_t best = first_argmax(scores);
  return base_record(model, example, best, scores[static_cast<Eigen::Index>(best)]);
}

PredictionRecord predict_softmax(const ThetaModel& model, const Example& example) {
  require_objective(model, ObjectiveKind::kSoftmax);
  check_model_dim(model, example);
  const Eigen::VectorXd scores = linear_scores(model.theta, example.features);
  const double top = scores.maxCoeff();
  Eigen::VectorXd prob = (scores.array() - top).exp().matrix();
  prob /= prob.sum();
  const Eigen::VectorXd expected = example_loss_matrix(example, model.loss) * prob;
  const std::size_t best = first_argmin(expected);
  auto r = base_record(model, example, best, top);
  r.distribution = prob;
  return r;
}

PredictionRecord predict(const ThetaModel& model, const Example& example,
                         const DoubleOracleOptions& options) {
  switch (model.objective) {
    case ObjectiveKind::kAda:
      return predict_ada(model, example, options);
    case ObjectiveKind::kSsvm:
      return predict_ssvm(model, example);
    case ObjectiveKind::kSoftmax:
      return predict_softmax(model, example);
  }
  throw UsageError("unknown objective");
}

PredictionRecord detect(std::span<const ThetaModel> models, const Example& example,
                        const DoubleOracleOptions& options) {
  if (models.empty()) throw UsageError("detection needs at least one class model");
  PredictionRecord best = predict(models[0], example, options);
  for (std::size_t i = 1; i < models.size(); ++i) {
    auto r = predict(models[i], example, options);
    if (r.score > best.score) best = std::move(r);
  }
  return best;
}

double accuracy_at_iou(std::span<const BoundingBox> predictions,
                       std::span<const BoundingBox> gts, double alpha) {
  if (predictions.size() != gts.size())
    throw DataError(std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(gts.size()) + " ground truths");
  if (predictions.empty()) throw DataError("accuracy of an empty prediction list");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gts.size(); ++i)
    if (iou(predictions[i], gts[i]) > alpha) ++hits;
  return static_cast<double>(hits) / static_cast<double>(gts.size());
}

double accuracy_at_iou(std::span<const PredictionRecord> predictions,
                       std::span<const BoundingBox> gts, double alpha) {
  std::vector<BoundingBox> boxes;
  boxes.reserve(predictions.size());
  for (const auto& p : predictions) boxes.push_back(p.box);
  return accuracy_at_iou(std::span<const BoundingBox>(boxes), gts, alpha);
}

double mean_ap(const std::map<int, double>& per_class) {
  if (per_class.empty()) throw DataError("mean over zero classes");
  double total = 0.0;
  for (const auto& [id, score] : per_class) total += score;
  return total / static_cast<double>(per_class.size());
}

double detection_accuracy(std::span<const PredictionRecord> predictions,
                          std::span<const LabeledBox> gts, double alpha) {
  if (predictions.size() != gts.size())
    throw DataError(std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(gts.size()) + " ground truths");
  if (predictions.empty()) throw DataError("accuracy of an empty prediction list");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gts.size(); ++i)
    if (predictions[i].class_id == gts[i].class_id && iou(predictions[i].box, gts[i].box) > alpha)
      ++hits;
  return static_cast<double>(hits) / static_cast<double>(gts.size());
}

std::string format_predictions(std::span<const PredictionRecord> predictions) {
  std::ostringstream out;
  out << "# image_id, class_id, x_min, y_min, x_max, y_max, score\n";
  for (const auto& p : predictions) {
    out << p.image_id << ", " << p.class_id << ", " << text::format_double(p.box.x_min()) << ", "
        << text::format_double(p.box.y_min()) << ", " << text::format_double(p.box.x_max())
        << ", " << text::format_double(p.box.y_max()) << ", " << text::format_double(p.score)
        << "\n";
  }
  return out.str();
}

std::vector<PredictionRecord> parse_predictions(const std::string& contents,
                                                const std::string& context) {
  std::vector<PredictionRecord> out;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string ctx = context + ":" + std::to_string(line_no);
    const auto view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row{std::string(view)};
    while (std::getline(row, field, ',')) fields.emplace_back(text::trim(field));
    if (fields.size() != 7)
      throw DataError(ctx + ": expected 7 comma-separated fields, found " +
                      std::to_string(fields.size()));
    PredictionRecord r;
    r.image_id = fields[0];
    if (r.image_id.empty()) throw DataError(ctx + ": empty image id");
    if (!seen.insert(r.image_id).second)
      throw DataError(ctx + ": duplicate prediction for '" + r.image_id + "'");
    r.class_id = static_cast<int>(text::parse_int(fields[1], ctx));
    try {
      r.box = BoundingBox(text::parse_double(fields[2], ctx), text::parse_double(fields[3], ctx),
                          text::parse_double(fields[4], ctx), text::parse_double(fields[5], ctx));
    } catch (const DataError& e) {
      throw DataError(ctx + ": " + e.what());
    }
    r.score = text::parse_double(fields[6], ctx);
    out.push_back(std::move(r));
  }
  return out;
}

void save_predictions(std::span<const PredictionRecord> predictions, const std::string& path) {
  text::write_file(path, format_predictions(predictions));
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  return parse_predictions(text::read_file(path), path);
}

AugmentationRecord augmentation_record(const ThetaModel& model, const Example& example,
                                       const DoubleOracleOptions& options) {
  require_objective(model, ObjectiveKind::kAda);
  check_model_dim(model, example);
  const auto eq =
      solve_example_game(model.theta, example, example_loss_matrix(example, model.loss), options);
  AugmentationRecord r;
  r.image_id = example.image_id;
  for (Eigen::Index j = 0; j < eq.p.size(); ++j)
    if (eq.p[j] > 0.0) r.boxes.emplace_back(example.proposals.boxes()[j], eq.p[j]);
  return r;
}

double AugmentationExport::mean_support() const {
  if (records.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : records) total += static_cast<double>(r.boxes.size());
  return total / static_cast<double>(records.size());
}

AugmentationExport compute_augmentation(const ThetaModel& model, const Dataset& data,
                                        const DoubleOracleOptions& options, unsigned jobs) {
  require_objective(model, ObjectiveKind::kAda);
  std::vector<std::optional<AugmentationRecord>> records(data.size());
  std::vector<std::string> errors(data.size());
  parallel_for(data.size(), jobs, [&](std::size_t i) {
    try {
      records[i] = augmentation_record(model, data.examples[i], options);
    } catch (const SolverError& e) {
      errors[i] = e.what();
    }
  });
  AugmentationExport out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (records[i]) {
      out.records.push_back(std::move(*records[i]));
    } else {
      out.failures.emplace_back(data.examples[i].image_id, errors[i]);
    }
  }
  return out;
}

namespace {
constexpr const char* kAugmentationMagic = "ada-augmentation 1";
}

std::string format_augmentation(const AugmentationExport& aug) {
  std::ostringstream out;
  out << kAugmentationMagic << "\n";
  if (aug.partial()) {
    out << "partial = true\n";
    for (const auto& [id, message] : aug.failures) {
      std::string flat = message;
      std::replace(flat.begin(), flat.end(), '\n', ' ');
      out << "failed = " << id << ": " << flat << "\n";
    }
  }
  for (const auto& r : aug.records) {
    out << "\nimage = " << r.image_id << "\n";
    for (const auto& [box, weight] : r.boxes)
      out << text::format_double(weight) << ": " << text::format_box(box) << "\n";
  }
  return out.str();
}

AugmentationExport parse_augmentation(const std::string& contents, const std::string& context) {
  AugmentationExport out;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || text::trim(line) != kAugmentationMagic)
    throw DataError(context + ": not an augmentation file (expected '" + kAugmentationMagic +
                    "')");
  bool partial = false;
  auto close = [&](const std::string& ctx) {
    if (out.records.empty()) return;
    const auto& r = out.records.back();
    if (r.boxes.empty()) throw DataError(ctx + ": image '" + r.image_id + "' has no boxes");
    double total = 0.0;
    for (const auto& [box, w] : r.boxes) total += w;
    if (std::abs(total - 1.0) > 1e-6)
      throw DataError(ctx + ": weights for '" + r.image_id + "' sum to " +
                      text::format_double(total));
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string ctx = context + ":" + std::to_string(line_no);
    const auto view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (view.starts_with("image =")) {
      close(ctx);
      out.records.push_back({std::string(text::trim(view.substr(7))), {}});
    } else if (view == "partial = true") {
      partial = true;
    } else if (view.starts_with("failed =")) {
      const auto rest = text::trim(view.substr(8));
      const auto colon = rest.find(':');
      if (colon == std::string_view::npos) throw DataError(ctx + ": malformed failure line");
      out.failures.emplace_back(std::string(rest.substr(0, colon)),
                                std::string(text::trim(rest.substr(colon + 1))));
    } else {
      const auto colon = view.find(':');
      if (colon == std::string_view::npos || out.records.empty())
        throw DataError(ctx + ": expected `weight: [box]`");
      const double w = text::parse_double(view.substr(0, colon), ctx);
      if (!(w > 0.0)) throw DataError(ctx + ": weights must be positive");
      out.records.back().boxes.emplace_back(text::parse_box(view.substr(colon + 1), ctx), w);
    }
  }
  close(context);
  if (partial != out.partial()) throw DataError(context + ": inconsistent partial flag");
  return out;
}

AugmentationExport export_augmentation(const ThetaModel& model, const Dataset& data,
                                       const std::string& path,
                                       const DoubleOracleOptions& options, unsigned jobs) {
  auto out = compute_augmentation(model, data, options, jobs);
  text::write_file(path, format_augmentation(out));
  return out;
}

namespace {

std::string percent(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << 100.0 * x;
  return s.str();
}

}  // namespace

std::string format_comparison(const std::vector<std::pair<std::string, EvaluationReport>>& rows) {
  if (rows.empty()) return {};
  const auto& first = rows.front().second;
  std::size_t name_width = 6;
  for (const auto& [name, r] : rows) name_width = std::max(name_width, name.size());
  std::ostringstream out;
  for (std::size_t t = 0; t < first.thresholds.size(); ++t) {
    if (t) out << "\n";
    out << "IoU > " << text::format_double(first.thresholds[t]) << "\n";
    out << std::left << std::setw(static_cast<int>(name_width)) << "method";
    for (const auto& [id, scores] : first.per_class)
      out << std::right << std::setw(9) << ("class " + std::to_string(id));
    out << std::right << std::setw(9) << "mAP" << "\n";
    for (const auto& [name, r] : rows) {
      out << std::left << std::setw(static_cast<int>(name_width)) << name;
      for (const auto& [id, scores] : r.per_class) out << std::right << std::setw(9) << percent(scores[t]);
      out << std::right << std::setw(9) << percent(r.mean[t]) << "\n";
    }
  }
  return out.str();
}

std::string EvaluationReport::format_table(const std::string& title) const {
  return format_comparison({{title, *this}});
}

std::string EvaluationReport::to_json() const {
  nlohmann::ordered_json j;
  j["thresholds"] = thresholds;
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (const auto& [id, scores] : per_class) {
    classes[std::to_string(id)] = {{"count", counts.at(id)}, {"accuracy", scores}};
  }
  j["classes"] = classes;
  j["mean"] = mean;
  return j.dump(2) + "\n";
}

EvaluationReport evaluate(std::span<const PredictionRecord> predictions,
                          const std::vector<std::pair<std::string, LabeledBox>>& gts,
                          const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw UsageError("no IoU thresholds given");
  std::map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.image_id, &p).second)
      throw DataError("duplicate prediction for '" + p.image_id + "'");
  }
  std::set<std::string> gt_ids;
  std::vector<std::string> unmatched;
  for (const auto& [id, label] : gts) {
    gt_ids.insert(id);
    if (!by_id.count(id)) unmatched.push_back("no prediction for '" + id + "'");
  }
  for (const auto& p : predictions)
    if (!gt_ids.count(p.image_id)) unmatched.push_back("no ground truth for '" + p.image_id + "'");
  if (!unmatched.empty()) {
    std::string msg = "prediction and manifest ids disagree:";
    for (const auto& m : unmatched) msg += "\n  " + m;
    throw DataError(msg);
  }
  if (gts.empty()) throw DataError("nothing to evaluate");

  std::map<int, std::vector<BoundingBox>> pred_boxes, gt_boxes;
  for (const auto& [id, label] : gts) {
    pred_boxes[label.class_id].push_back(by_id.at(id)->box);
    gt_boxes[label.class_id].push_back(label.box);
  }
  EvaluationReport report;
  report.thresholds = thresholds;
  for (const auto& [cls, boxes] : gt_boxes) {
    report.counts[cls] = boxes.size();
    auto& scores = report.per_class[cls];
    for (double t : thresholds) scores.push_back(accuracy_at_iou(pred_boxes[cls], boxes, t));
  }
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    std::map<int, double> column;
    for (const auto& [cls, scores] : report.per_class) column[cls] = scores[t];
    report.mean.push_back(mean_ap(column));
  }
  return report;
}

}  // namespace ada
