#include "ada/experiments.hpp"

#include "ada/error.hpp"
#include "doctest.h"
#include "example_support.hpp"
#include "test_support.hpp"

using namespace ada;
using ada::testing::make_dataset;
using ada::testing::make_example;

namespace {

// gt [0,0,10,10]; IoUs with it: 1, 0.81, 0.64, 0.25, 0.
Example nested_example(std::optional<std::vector<double>> scores = std::nullopt) {
  std::vector<BoundingBox> boxes{BoundingBox(0, 0, 10, 10), BoundingBox(0, 0, 9, 9),
                                 BoundingBox(0, 0, 8, 8), BoundingBox(0, 0, 5, 5),
                                 BoundingBox(20, 20, 30, 30)};
  Eigen::MatrixXd rows = Eigen::MatrixXd::Identity(5, 5);
  FeatureMatrix fm{"n", rows, 0};
  return Example{"n", 0, ProposalSet("n", boxes, std::move(scores)), fm, boxes[0]};
}

}  // namespace

TEST_CASE("threshold augmentation keeps the annotation first") {
  const auto data = make_dataset({nested_example()});
  const auto out = augment_dataset(data, {AugmentRegime::kThreshold, 0.6, 1});
  REQUIRE(out.size() == 3);
  CHECK(out.examples[0].image_id == "n");
  CHECK(out.examples[1].image_id == "n#1");
  CHECK(out.examples[2].image_id == "n#2");
  CHECK(out.examples[0].gt == BoundingBox(0, 0, 10, 10));
  CHECK(out.examples[1].gt == BoundingBox(0, 0, 9, 9));
  CHECK(out.examples[2].gt == BoundingBox(0, 0, 8, 8));
  for (const auto& ex : out.examples) {
    CHECK(ex.features.gt_index == ex.proposals.find(ex.gt).value());
    CHECK_NOTHROW(ex.features.validate());
  }
  CHECK(augment_dataset(data, {AugmentRegime::kThreshold, 0.99, 1}).size() == 1);
  CHECK(augment_dataset(data, {AugmentRegime::kThreshold, 0.0, 1}).size() == 4);
}

TEST_CASE("top-k augmentation ranks by score, else by IoU") {
  const auto by_iou = augment_dataset(make_dataset({nested_example()}), {AugmentRegime::kTopK, 0, 3});
  REQUIRE(by_iou.size() == 3);
  CHECK(by_iou.examples[1].gt == BoundingBox(0, 0, 9, 9));
  CHECK(by_iou.examples[2].gt == BoundingBox(0, 0, 8, 8));

  const auto scored = make_dataset({nested_example(std::vector<double>{0.1, 0.2, 0.3, 0.9, 0.5})});
  const auto by_score = augment_dataset(scored, {AugmentRegime::kTopK, 0, 3});
  REQUIRE(by_score.size() == 3);
  CHECK(by_score.examples[0].gt == BoundingBox(0, 0, 10, 10));
  CHECK(by_score.examples[1].gt == BoundingBox(0, 0, 5, 5));
  CHECK(by_score.examples[2].gt == BoundingBox(20, 20, 30, 30));

  // k = 1 is the unaugmented data; k beyond |Y| keeps everything once.
  const auto one = augment_dataset(scored, {AugmentRegime::kTopK, 0, 1});
  REQUIRE(one.size() == 1);
  CHECK(one.examples[0].gt == scored.examples[0].gt);
  CHECK(augment_dataset(scored, {AugmentRegime::kTopK, 0, 50}).size() == 5);
  CHECK_THROWS_AS(augment_dataset(scored, {AugmentRegime::kTopK, 0, 0}), UsageError);

  CHECK(AugmentSetting{AugmentRegime::kTopK, 0, 4}.label() == "top-4");
  CHECK(AugmentSetting{AugmentRegime::kThreshold, 0.75, 1}.label() == "IoU > 0.75");
}

TEST_CASE("run_method and the sweep on a tiny corpus") {
  const ada::testing::TempDir dir("experiment");
  SyntheticConfig train_config;
  train_config.count = 6;
  SyntheticConfig test_config = train_config;
  test_config.seed = 99;
  const auto train = write_synthetic_corpus(train_config, dir.file("train"));
  const auto test = write_synthetic_corpus(test_config, dir.file("test"));
  PipelineConfig pipeline;
  pipeline.proposals = default_synthetic_proposals();
  auto ex = prepare_experiment(train, test, pipeline);
  CHECK(ex.train.size() == 3);
  CHECK(ex.test.size() == 3);
  ex.training.epochs = 3;
  ex.training.ssvm_rounds = 3;

  const auto report = run_method(ex, ObjectiveKind::kAda);
  CHECK(report.thresholds == std::vector<double>{0.5, 0.7});
  CHECK(report.per_class.size() == 3);
  for (const auto& [c, acc] : report.per_class) CHECK(acc[1] <= acc[0]);

  const auto sweep = run_augmentation_sweep(ex, {0.5, 0.8}, {1, 2}, 1);
  REQUIRE(sweep.rows.size() == 4);
  CHECK(sweep.rows[0].training_examples >= sweep.rows[1].training_examples);
  CHECK(sweep.rows[2].training_examples == 6);
  CHECK(sweep.rows[3].training_examples == 12);
  CHECK(sweep.reference.setting.threshold == 0.99);
  CHECK(sweep.best() >= sweep.rows[2].report.mean[1]);
  const auto table = format_sweep(sweep);
  CHECK(table.find("top-2") != std::string::npos);
  CHECK(table.find("IoU > 0.99") != std::string::npos);
  CHECK_THROWS_AS(run_augmentation_sweep(ex, {0.5}, {1}, 5), UsageError);
}
