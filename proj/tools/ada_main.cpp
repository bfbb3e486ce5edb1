#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ada/dataset.hpp"
#include "ada/error.hpp"
#include "ada/evaluation.hpp"
#include "ada/game.hpp"
#include "ada/learning.hpp"
#include "ada/parallel.hpp"
#include "ada/text_format.hpp"

namespace fs = std::filesystem;
using namespace ada;

namespace {

// Fails unless `path` can be created as a file: its directory must exist.
void require_writable_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string(what) + " path is empty");
  const fs::path p(path);
  if (fs::is_directory(p)) throw DataError(std::string(what) + " '" + path + "' is a directory");
  const auto parent = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  if (!fs::is_directory(parent))
    throw DataError(std::string(what) + " directory '" + parent.string() + "' does not exist");
}

Manifest open_manifest(const std::string& path) {
  auto m = load_manifest(path);
  m.validate();
  if (m.entries.empty()) throw DataError("manifest '" + path + "' lists no images");
  return m;
}

std::vector<std::pair<double, double>> parse_sizes(const std::string& spec) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : text::split(spec, ", ")) {
    const auto x = item.find('x');
    try {
      if (x == std::string_view::npos) {
        const double s = text::parse_double(item, "--sizes");
        out.emplace_back(s, s);
      } else {
        out.emplace_back(text::parse_double(item.substr(0, x), "--sizes"),
                         text::parse_double(item.substr(x + 1), "--sizes"));
      }
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
  }
  if (out.empty()) throw UsageError("--sizes lists no window sizes");
  return out;
}

struct ProposalOptions {
  std::string generator = "grid";
  std::size_t k;
  std::string sizes;
  double stride;
  double max_translation;
  double max_scale;
  std::size_t samples;
  std::uint64_t seed;

  ProposalOptions() {
    const auto d = default_synthetic_proposals();
    k = d.k;
    for (const auto& [w, h] : d.scales)
      sizes += (sizes.empty() ? "" : ",") + text::format_double(w) + "x" + text::format_double(h);
    stride = d.stride_x;
    max_translation = d.max_translation;
    max_scale = d.max_scale;
    samples = d.samples;
    seed = d.rng_seed;
  }

  void add(CLI::App* app) {
    app->add_option("--proposals", generator, "Proposal generator")
        ->check(CLI::IsMember({"grid", "jitter", "file"}))
        ->capture_default_str();
    app->add_option("--k", k, "Proposals kept per image")->capture_default_str();
    app->add_option("--sizes", sizes, "Grid window sizes, e.g. 12x12,20x20")->capture_default_str();
    app->add_option("--stride", stride, "Grid stride in pixels")->capture_default_str();
    app->add_option("--max-translation", max_translation, "Jitter translation (pixels)")
        ->capture_default_str();
    app->add_option("--max-scale", max_scale, "Jitter relative scale change")->capture_default_str();
    app->add_option("--samples", samples, "Jitter samples per image")->capture_default_str();
    app->add_option("--proposal-seed", seed, "Jitter seed")->capture_default_str();
  }

  ProposalConfig build() const {
    ProposalConfig c = default_synthetic_proposals();
    c.generator = generator == "grid"     ? ProposalGenerator::kGrid
                  : generator == "jitter" ? ProposalGenerator::kJitter
                                          : ProposalGenerator::kFile;
    c.k = k;
    c.scales = parse_sizes(sizes);
    c.stride_x = c.stride_y = stride;
    c.max_translation = max_translation;
    c.max_scale = max_scale;
    c.samples = samples;
    c.rng_seed = seed;
    c.validate();
    return c;
  }
};

struct ExtractorOptions {
  std::string kind = "context";
  int bins = ExtractorSpec{}.bins;
  bool no_normalize = false;

  void add(CLI::App* app) {
    app->add_option("--extractor", kind, "Feature extractor")
        ->check(CLI::IsMember({"context", "histogram", "geometry", "file"}))
        ->capture_default_str();
    app->add_option("--bins", bins, "Histogram bins")->capture_default_str();
    app->add_flag("--no-normalize", no_normalize, "Keep raw feature rows");
  }

  ExtractorSpec build() const {
    ExtractorSpec s;
    s.kind = parse_extractor_kind(kind);
    s.bins = bins;
    s.normalize = !no_normalize;
    s.validate();
    return s;
  }
};

struct LossOptions {
  std::string kind = "overlap";
  double alpha = LossSpec{}.alpha;

  void add(CLI::App* app) {
    app->add_option("--loss", kind, "Localization loss")
        ->check(CLI::IsMember({"overlap", "thresholded"}))
        ->capture_default_str();
    app->add_option("--alpha", alpha, "IoU threshold of the thresholded loss")
        ->capture_default_str();
  }

  LossSpec build() const {
    LossSpec s = kind == "overlap" ? LossSpec::overlap() : LossSpec::thresholded(alpha);
    s.validate();
    return s;
  }
};

struct GenerateCommand {
  SyntheticConfig config;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--out", out, "Output directory")->required();
    app->add_option("--count", config.count, "Images")->capture_default_str();
    app->add_option("--seed", config.seed, "Corpus seed")->capture_default_str();
    app->add_option("--width", config.width, "Image width")->capture_default_str();
    app->add_option("--height", config.height, "Image height")->capture_default_str();
    app->add_option("--classes", config.classes, "Shape classes")->capture_default_str();
    app->add_option("--min-size", config.min_size, "Smallest object side")->capture_default_str();
    app->add_option("--max-size", config.max_size, "Largest object side")->capture_default_str();
    app->add_option("--size-step", config.size_step, "Object side step")->capture_default_str();
    app->add_option("--noise-pixels", config.noise_pixels, "Annotation noise, pixels")
        ->capture_default_str();
    app->add_option("--noise-fraction", config.noise_fraction,
                    "Annotation noise, fraction of box side")
        ->capture_default_str();
  }

  int run() const {
    config.validate();
    const auto m = write_synthetic_corpus(config, out);
    std::cerr << "wrote " << m.entries.size() << " images to " << out << "\n";
    return 0;
  }
};

struct TrainCommand {
  std::string manifest, out, objective = "ada";
  std::optional<int> class_id;
  bool quiet = false;
  TrainConfig training;
  LossOptions loss;
  ProposalOptions proposals;
  ExtractorOptions extractor;

  void add(CLI::App* app) {
    app->add_option("--manifest", manifest, "Training manifest")->required();
    app->add_option("--out", out, "Model file")->required();
    app->add_option("--objective", objective, "Training objective")
        ->check(CLI::IsMember({"ada", "ssvm", "softmax"}))
        ->capture_default_str();
    app->add_option("--class", class_id, "Train this class only");
    app->add_option("--epochs", training.epochs, "Epochs (ADA, softmax)")->capture_default_str();
    app->add_option("--learning-rate", training.learning_rate, "AdaGrad step")
        ->capture_default_str();
    app->add_option("--minibatch", training.minibatch, "Minibatch size")->capture_default_str();
    app->add_option("--seed", training.seed, "Shuffling seed")->capture_default_str();
    app->add_option("--oracle-eps", training.oracle_eps, "Double-oracle tolerance")
        ->capture_default_str();
    app->add_option("--tolerance", training.tolerance, "Early-stop gradient norm")
        ->capture_default_str();
    app->add_option("--lambda", training.ssvm_lambda, "SSVM regularizer")->capture_default_str();
    app->add_option("--ssvm-rounds", training.ssvm_rounds, "SSVM cutting-plane rounds")
        ->capture_default_str();
    app->add_option("--positive-iou", training.softmax_positive_iou,
                    "Softmax positives: IoU with the ground truth")
        ->capture_default_str();
    app->add_flag("--quiet", quiet, "No per-epoch log");
    loss.add(app);
    proposals.add(app);
    extractor.add(app);
  }

  int run(unsigned jobs) {
    const auto kind = parse_objective(objective);
    training.jobs = jobs;
    training.validate();
    const auto loss_spec = loss.build();
    PipelineConfig pipeline{proposals.build(), extractor.build(), jobs};
    const auto m = open_manifest(manifest);
    require_writable_file(out, "model");
    std::vector<int> classes = class_ids(m);
    if (class_id) {
      if (std::find(classes.begin(), classes.end(), *class_id) == classes.end())
        throw DataError("manifest has no images of class " + std::to_string(*class_id));
      classes = {*class_id};
    }

    std::vector<ThetaModel> models;
    for (const int c : classes) {
      const auto data = build_dataset(m, pipeline, true, c);
      std::cerr << "class " << c << ": " << data.size() << " images, D = "
                << data.examples.front().features.dim() << "\n";
      TrainObserver log;
      if (!quiet)
        log = [&](const EpochStats& s) {
          std::cerr << "class " << c << " epoch " << s.epoch << " gradient_norm "
                    << text::format_double(s.gradient_norm);
          // ADA does not evaluate its dual objective while training.
          if (kind != ObjectiveKind::kAda)
            std::cerr << " objective " << text::format_double(s.objective);
          std::cerr << "\n";
        };
      ThetaModel model = kind == ObjectiveKind::kAda    ? train_ada(data, training, loss_spec, log)
                         : kind == ObjectiveKind::kSsvm ? train_ssvm(data, training, loss_spec, log)
                                                        : train_softmax(data, training, loss_spec, log);
      model.class_id = c;
      models.push_back(std::move(model));
    }
    save_models(models, out);
    std::cerr << "wrote " << models.size() << " " << objective << " model(s) to " << out << "\n";
    return 0;
  }
};

// Per-class models keyed by class id; duplicates are an error.
std::map<int, ThetaModel> models_by_class(const std::vector<ThetaModel>& models,
                                          const std::string& path) {
  std::map<int, ThetaModel> out;
  for (const auto& m : models)
    if (!out.emplace(m.class_id, m).second)
      throw DataError("'" + path + "' holds two models for class " + std::to_string(m.class_id));
  return out;
}

struct PredictCommand {
  std::string manifest, model, out;
  bool detect_mode = false;
  ProposalOptions proposals;

  void add(CLI::App* app) {
    app->add_option("--manifest", manifest, "Test manifest")->required();
    app->add_option("--model", model, "Model file")->required();
    app->add_option("--out", out, "Predictions file")->required();
    app->add_flag("--detect", detect_mode,
                  "Ignore manifest classes; run every model and keep the best score");
    proposals.add(app);
  }

  int run(unsigned jobs) const {
    const auto proposal_config = proposals.build();
    const auto m = open_manifest(manifest);
    const auto models = load_models(model);
    if (models.empty()) throw DataError("'" + model + "' holds no models");
    const auto by_class = models_by_class(models, model);
    require_writable_file(out, "predictions");

    std::map<std::string, PredictionRecord> predicted;
    if (detect_mode) {
      for (const auto& mod : models)
        if (!(mod.extractor == models.front().extractor))
          throw DataError("--detect needs every model to use the same extractor");
      const auto data =
          build_dataset(m, PipelineConfig{proposal_config, models.front().extractor, jobs}, false);
      std::vector<PredictionRecord> records(data.size());
      parallel_for(data.size(), jobs,
                   [&](std::size_t i) { records[i] = detect(models, data.examples[i]); });
      for (auto& r : records) predicted.emplace(r.image_id, std::move(r));
    } else {
      for (const int c : class_ids(m)) {
        const auto it = by_class.find(c);
        if (it == by_class.end())
          throw DataError("'" + model + "' has no model for class " + std::to_string(c));
        const auto data =
            build_dataset(m, PipelineConfig{proposal_config, it->second.extractor, jobs}, false, c);
        std::vector<PredictionRecord> records(data.size());
        parallel_for(data.size(), jobs,
                     [&](std::size_t i) { records[i] = predict(it->second, data.examples[i]); });
        for (auto& r : records) predicted.emplace(r.image_id, std::move(r));
      }
    }
    std::vector<PredictionRecord> ordered;
    for (const auto& e : m.entries) ordered.push_back(predicted.at(e.image_id));
    save_predictions(ordered, out);
    std::cerr << "wrote " << ordered.size() << " predictions to " << out << "\n";
    return 0;
  }
};

struct EvaluateCommand {
  std::string predictions, manifest, out, json, truth = "annotated";
  std::vector<double> thresholds{0.5, 0.7};

  void add(CLI::App* app) {
    app->add_option("--predictions", predictions, "Predictions file")->required();
    app->add_option("--manifest", manifest, "Manifest with ground truth")->required();
    app->add_option("--thresholds", thresholds, "IoU thresholds")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--out", out, "Report file (default: standard output)");
    app->add_option("--json", json, "JSON report (default: <out>.json when --out is given)");
    app->add_option("--truth", truth, "Score against the annotated or the noise-free box")
        ->check(CLI::IsMember({"annotated", "true"}))
        ->capture_default_str();
  }

  int run() {
    if (thresholds.empty()) throw UsageError("--thresholds is empty");
    for (const double t : thresholds)
      if (!(t >= 0.0 && t < 1.0)) throw UsageError("IoU thresholds must lie in [0, 1)");
    if (json.empty() && !out.empty()) json = out + ".json";
    const auto m = open_manifest(manifest);
    const auto preds = load_predictions(predictions);
    if (!out.empty()) require_writable_file(out, "report");
    if (!json.empty()) require_writable_file(json, "JSON report");

    std::vector<std::pair<std::string, LabeledBox>> gts;
    for (const auto& e : m.entries) {
      if (truth == "true" && !e.true_box)
        throw DataError("image '" + e.image_id + "' has no true_box in the manifest");
      gts.emplace_back(e.image_id, LabeledBox{e.class_id, truth == "true" ? *e.true_box : e.gt});
    }
    const auto report = evaluate(preds, gts, thresholds);
    const auto table = report.format_table();
    if (out.empty()) {
      std::cout << table;
    } else {
      text::write_file(out, table);
    }
    if (!json.empty()) text::write_file(json, report.to_json() + "\n");
    return 0;
  }
};

struct AugmentCommand {
  std::string manifest, model, out;
  ProposalOptions proposals;
  double oracle_eps = DoubleOracleOptions{}.eps;

  void add(CLI::App* app) {
    app->add_option("--manifest", manifest, "Training manifest")->required();
    app->add_option("--model", model, "ADA model file")->required();
    app->add_option("--out", out, "Augmentation file")->required();
    app->add_option("--oracle-eps", oracle_eps, "Double-oracle tolerance")->capture_default_str();
    proposals.add(app);
  }

  int run(unsigned jobs) const {
    if (!(oracle_eps > 0.0)) throw UsageError("--oracle-eps must be positive");
    const auto proposal_config = proposals.build();
    const auto m = open_manifest(manifest);
    const auto models = load_models(model);
    const auto by_class = models_by_class(models, model);
    for (const auto& mod : models)
      if (mod.objective != ObjectiveKind::kAda)
        throw UsageError("augment needs an ada model; '" + model + "' holds " +
                         to_string(mod.objective));
    require_writable_file(out, "augmentation");

    DoubleOracleOptions options;
    options.eps = oracle_eps;
    std::map<std::string, AugmentationRecord> records;
    std::map<std::string, std::string> failures;
    for (const int c : class_ids(m)) {
      const auto it = by_class.find(c);
      if (it == by_class.end())
        throw DataError("'" + model + "' has no model for class " + std::to_string(c));
      const auto data =
          build_dataset(m, PipelineConfig{proposal_config, it->second.extractor, jobs}, true, c);
      auto part = compute_augmentation(it->second, data, options, jobs);
      for (auto& r : part.records) records.emplace(r.image_id, std::move(r));
      for (auto& [id, msg] : part.failures) failures.emplace(id, msg);
    }
    AugmentationExport result;
    for (const auto& e : m.entries) {
      if (const auto r = records.find(e.image_id); r != records.end())
        result.records.push_back(r->second);
      if (const auto f = failures.find(e.image_id); f != failures.end())
        result.failures.emplace_back(f->first, f->second);
    }
    text::write_file(out, format_augmentation(result));
    std::cerr << "augmented " << result.records.size() << " images, mean support "
              << text::format_double(result.mean_support()) << "\n";
    if (result.partial()) {
      for (const auto& [id, msg] : result.failures)
        std::cerr << "solver failure on '" << id << "': " << msg << "\n";
      return static_cast<int>(ExitCode::kSolver);
    }
    return 0;
  }
};

struct SolveGameCommand {
  std::string matrix;
  double tolerance = 1e-9;

  void add(CLI::App* app) {
    app->add_option("matrix", matrix, "Dense matrix file")->required();
    app->add_option("--tolerance", tolerance, "Regret bound for certification")
        ->capture_default_str();
  }

  int run() const {
    if (!(tolerance >= 0.0)) throw UsageError("--tolerance must be non-negative");
    const auto g = parse_game_matrix(text::read_file(matrix), matrix);
    const auto eq = solve_matrix_game(g);
    const auto regret = verify_equilibrium(g, eq.f, eq.p);
    std::cout << format_game_report(g, eq, regret);
    if (!regret.certified(tolerance)) {
      std::cerr << "equilibrium not certified at " << text::format_double(tolerance) << "\n";
      return static_cast<int>(ExitCode::kSolver);
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial data augmentation for bounding-box localization"};
  app.set_config("--config", "", "INI file with one [command] section; flags override it");
  unsigned jobs = default_jobs();
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.require_subcommand(1);

  GenerateCommand generate;
  TrainCommand train;
  PredictCommand predict_cmd;
  EvaluateCommand evaluate_cmd;
  AugmentCommand augment;
  SolveGameCommand solve_game;
  auto* gen_app = app.add_subcommand("generate", "Write a synthetic corpus and its manifest");
  auto* train_app = app.add_subcommand("train", "Train one model per class");
  auto* predict_app = app.add_subcommand("predict", "Predict one box per image");
  auto* evaluate_app = app.add_subcommand("evaluate", "Accuracy at IoU thresholds");
  auto* augment_app = app.add_subcommand("augment", "Export adversarial box distributions");
  auto* solve_app = app.add_subcommand("solve-game", "Solve a zero-sum matrix game");
  generate.add(gen_app);
  train.add(train_app);
  predict_cmd.add(predict_app);
  evaluate_cmd.add(evaluate_app);
  augment.add(augment_app);
  solve_game.add(solve_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (gen_app->parsed()) return generate.run();
    if (train_app->parsed()) return train.run(jobs);
    if (predict_app->parsed()) return predict_cmd.run(jobs);
    if (evaluate_app->parsed()) return evaluate_cmd.run();
    if (augment_app->parsed()) return augment.run(jobs);
    if (solve_app->parsed()) return solve_game.run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kData);
  }
  return static_cast<int>(ExitCode::kUsage);
}
