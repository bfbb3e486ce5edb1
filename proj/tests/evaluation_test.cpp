#include "ada/evaluation.hpp"

#include <random>

#include "ada/error.hpp"
#include "ada/text_format.hpp"
#include "doctest.h"
#include "example_support.hpp"
#include "test_support.hpp"

using namespace ada;
using ada::testing::disjoint_boxes;
using ada::testing::make_dataset;
using ada::testing::make_example;

namespace {

ThetaModel model_of(ObjectiveKind kind, Eigen::VectorXd theta) {
  ThetaModel m;
  m.objective = kind;
  m.theta = std::move(theta);
  m.loss = LossSpec::overlap();
  return m;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Duck: three disjoint boxes; theta = 1 on a scalar feature gives psi = (0, 0, -1)
// relative to box 0.
Example duck() {
  Eigen::MatrixXd rows(3, 1);
  rows << 0, 0, -1;
  return make_example("duck", disjoint_boxes(3), rows, 0);
}

Example random_example(std::mt19937_64& rng, int dim, const std::string& id) {
  std::uniform_int_distribution<std::size_t> count(1, 9);
  const std::size_t n = count(rng);
  std::vector<BoundingBox> boxes;
  while (boxes.size() < n) {
    const auto b = ada::testing::random_lattice_box(rng, 10);
    bool dup = false;
    for (const auto& o : boxes) dup = dup || o.same_coordinates(b);
    if (!dup) boxes.push_back(b);
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) rows(i, j) = unit(rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  return make_example(id, std::move(boxes), std::move(rows), pick(rng));
}

Eigen::VectorXd random_theta(std::mt19937_64& rng, int dim, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd t(dim);
  for (Eigen::Index i = 0; i < dim; ++i) t[i] = normal(rng);
  return t;
}

}  // namespace

TEST_CASE("predict_ada examples") {
  const auto single = make_example("one", {BoundingBox(1, 1, 4, 4)}, Eigen::MatrixXd::Ones(1, 2), 0);
  CHECK(predict_ada(model_of(ObjectiveKind::kAda, vec({3, -1})), single).box ==
        BoundingBox(1, 1, 4, 4));

  const auto r = predict_ada(model_of(ObjectiveKind::kAda, vec({1})), duck());
  CHECK(r.index == 0);
  CHECK(r.distribution[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.distribution[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.distribution[2] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(r.adversary.sum() == doctest::Approx(1.0));
  // v = 0.5 with the predicted box (psi 0) as reference.
  CHECK(r.score == doctest::Approx(-0.5).epsilon(1e-9));

  Eigen::MatrixXd same(2, 2);
  same << 0.3, 0.7, 0.3, 0.7;
  const auto sym = make_example("sym", disjoint_boxes(2), same, 0);
  const auto s = predict_ada(model_of(ObjectiveKind::kAda, vec({0, 0})), sym);
  CHECK(s.index == 0);
  CHECK(s.distribution[0] == doctest::Approx(0.5));

  CHECK_THROWS_AS(predict_ada(model_of(ObjectiveKind::kSsvm, vec({1})), duck()), UsageError);
  try {
    predict_ada(model_of(ObjectiveKind::kAda, vec({1, 2})), duck());
    FAIL("expected a dimension error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("D=2") != std::string::npos);
    CHECK(std::string(e.what()).find("D=1") != std::string::npos);
  }
}

TEST_CASE("predict_ssvm examples") {
  Eigen::MatrixXd rows(3, 3);
  rows << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  const auto ex = make_example("s", disjoint_boxes(3), rows, 0);
  CHECK(predict_ssvm(model_of(ObjectiveKind::kSsvm, vec({0, 0, 0})), ex).index == 0);
  const auto aligned = predict_ssvm(model_of(ObjectiveKind::kSsvm, vec({0, 0, 2})), ex);
  CHECK(aligned.index == 2);
  CHECK(aligned.score == 2.0);
  const auto single = make_example("one", {BoundingBox(0, 0, 2, 2)}, Eigen::MatrixXd::Ones(1, 3), 0);
  CHECK(predict_ssvm(model_of(ObjectiveKind::kSsvm, vec({-1, 5, 2})), single).index == 0);
}

TEST_CASE("predict_softmax examples") {
  const auto single = make_example("one", {BoundingBox(0, 0, 2, 2)}, Eigen::MatrixXd::Ones(1, 1), 0);
  const auto one = predict_softmax(model_of(ObjectiveKind::kSoftmax, vec({4})), single);
  CHECK(one.index == 0);
  CHECK(one.distribution[0] == 1.0);

  // theta = 0 on three disjoint boxes: every candidate has expected loss 2/3.
  const auto d = duck();
  const auto uniform = predict_softmax(model_of(ObjectiveKind::kSoftmax, vec({0})), d);
  CHECK(uniform.index == 0);
  const Eigen::VectorXd expected = example_loss_matrix(d, LossSpec::overlap()) * uniform.distribution;
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(expected[i] == doctest::Approx(2.0 / 3.0));

  // Mass > 0.99 on box 2.
  Eigen::MatrixXd rows(3, 1);
  rows << 0, 0, 1;
  const auto peaked = make_example("p", disjoint_boxes(3), rows, 0);
  const auto r = predict_softmax(model_of(ObjectiveKind::kSoftmax, vec({10})), peaked);
  CHECK(r.distribution[2] > 0.99);
  CHECK(r.index == 2);
}

TEST_CASE("prediction invariants on random instances") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 1 + trial % 4;
    const auto ex = random_example(rng, dim, "r" + std::to_string(trial));
    const auto theta = random_theta(rng, dim, trial % 2 ? 0.5 : 3.0);

    const auto a = predict_ada(model_of(ObjectiveKind::kAda, theta), ex);
    CHECK(a.distribution.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.adversary.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.distribution.minCoeff() >= 0.0);
    CHECK(a.adversary.minCoeff() >= 0.0);
    const double chosen = a.distribution[static_cast<Eigen::Index>(a.index)];
    CHECK(a.distribution.maxCoeff() <= chosen + 1e-9);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(a.index); ++i)
      CHECK(a.distribution[i] < chosen - 1e-9);

    const auto s = predict_softmax(model_of(ObjectiveKind::kSoftmax, theta), ex);
    CHECK(s.distribution.sum() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd risk = example_loss_matrix(ex, LossSpec::overlap()) * s.distribution;
    CHECK(risk.minCoeff() == risk[static_cast<Eigen::Index>(s.index)]);

    const auto v = predict_ssvm(model_of(ObjectiveKind::kSsvm, theta), ex);
    CHECK(v.score == linear_scores(theta, ex.features).maxCoeff());
  }

  // A singleton label space always yields y*, for every model.
  for (int trial = 0; trial < 1000; ++trial) {
    const auto box = ada::testing::random_box(rng);
    const auto theta = random_theta(rng, 3, 5.0);
    Eigen::MatrixXd rows = random_theta(rng, 3, 1.0).transpose();
    const auto ex = make_example("s", {box}, rows, 0);
    CHECK(predict_ada(model_of(ObjectiveKind::kAda, theta), ex).box == box);
  }
}

TEST_CASE("accuracy_at_iou and mean_ap") {
  const std::vector<BoundingBox> gts{BoundingBox(0, 0, 10, 10), BoundingBox(20, 20, 30, 30)};
  CHECK(accuracy_at_iou(std::span<const BoundingBox>(gts), gts, 0.5) == 1.0);
  const std::vector<BoundingBox> far{BoundingBox(50, 50, 60, 60), BoundingBox(70, 70, 80, 80)};
  CHECK(accuracy_at_iou(std::span<const BoundingBox>(far), gts, 0.5) == 0.0);
  const std::vector<BoundingBox> half{BoundingBox(0, 0, 10, 10), BoundingBox(70, 70, 80, 80)};
  CHECK(accuracy_at_iou(std::span<const BoundingBox>(half), gts, 0.5) == 0.5);
  const std::vector<BoundingBox> one{gts[0]};
  CHECK_THROWS_AS(accuracy_at_iou(std::span<const BoundingBox>(one), gts, 0.5), DataError);
  // Strictly greater: IoU exactly 0.5 does not count.
  const std::vector<BoundingBox> a{BoundingBox(0, 0, 10, 10)}, b{BoundingBox(0, 0, 10, 5)};
  CHECK(accuracy_at_iou(std::span<const BoundingBox>(a), b, 0.5) == 0.0);

  CHECK(mean_ap({{0, 0.8}}) == doctest::Approx(0.8));
  CHECK(mean_ap({{0, 0.9}, {3, 0.7}}) == doctest::Approx(0.8));
  CHECK(mean_ap({{0, 1.0}, {1, 1.0}, {2, 1.0}}) == 1.0);
  CHECK_THROWS_AS(mean_ap({}), DataError);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<BoundingBox> p, g;
    for (int i = 0; i < 8; ++i) {
      p.push_back(ada::testing::random_lattice_box(rng));
      g.push_back(ada::testing::random_lattice_box(rng));
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double lo = unit(rng), hi = unit(rng);
    if (lo > hi) std::swap(lo, hi);
    CHECK(accuracy_at_iou(std::span<const BoundingBox>(p), g, hi) <=
          accuracy_at_iou(std::span<const BoundingBox>(p), g, lo));
  }
}

TEST_CASE("detection_accuracy") {
  PredictionRecord r;
  r.class_id = 1;
  r.box = BoundingBox(0, 0, 10, 10);
  const std::vector<PredictionRecord> preds{r};
  // IoU 0.9.
  CHECK(detection_accuracy(preds, std::vector<LabeledBox>{{1, BoundingBox(0, 0, 10, 9)}}, 0.7) == 1.0);
  CHECK(detection_accuracy(preds, std::vector<LabeledBox>{{2, BoundingBox(0, 0, 10, 10)}}, 0.7) == 0.0);
  // IoU 0.6.
  CHECK(detection_accuracy(preds, std::vector<LabeledBox>{{1, BoundingBox(0, 0, 10, 6)}}, 0.7) == 0.0);
  CHECK_THROWS_AS(detection_accuracy(preds, std::vector<LabeledBox>{}, 0.7), DataError);
}

TEST_CASE("detect picks the most confident class model") {
  Eigen::MatrixXd rows(2, 2);
  rows << 1, 0, 0, 1;
  const auto ex = make_example("d", disjoint_boxes(2), rows, 0);
  auto a = model_of(ObjectiveKind::kSsvm, vec({1, 0}));
  a.class_id = 4;
  auto b = model_of(ObjectiveKind::kSsvm, vec({0, 3}));
  b.class_id = 9;
  const std::vector<ThetaModel> models{a, b};
  const auto r = detect(models, ex);
  CHECK(r.class_id == 9);
  CHECK(r.index == 1);
  CHECK_THROWS_AS(detect(std::span<const ThetaModel>(), ex), UsageError);
}

TEST_CASE("prediction files round-trip") {
  std::vector<PredictionRecord> preds(2);
  preds[0].image_id = "img_1";
  preds[0].class_id = 2;
  preds[0].box = BoundingBox(0.5, 1, 10, 12.25);
  preds[0].score = -0.125;
  preds[1].image_id = "img_2";
  preds[1].box = BoundingBox(3, 4, 5, 6);
  preds[1].score = 1.0 / 3.0;
  const auto text = format_predictions(preds);
  const auto back = parse_predictions(text, "p");
  REQUIRE(back.size() == 2);
  CHECK(back[0].box == preds[0].box);
  CHECK(back[1].score == preds[1].score);
  CHECK(format_predictions(back) == text);

  CHECK_THROWS_AS(parse_predictions("a, 1, 0, 0, 1\n", "p"), DataError);
  CHECK_THROWS_AS(parse_predictions("a, 1, 0, 0, 1, 1, 0\na, 1, 0, 0, 1, 1, 0\n", "p"), DataError);
  CHECK_THROWS_WITH_AS(parse_predictions("a, x, 0, 0, 1, 1, 0\n", "p"), doctest::Contains("p:1"),
                       DataError);
}

TEST_CASE("augmentation export") {
  ThetaModel ada = model_of(ObjectiveKind::kAda, vec({1}));
  const auto single = make_example("one", {BoundingBox(1, 1, 4, 4)}, Eigen::MatrixXd::Ones(1, 1), 0);
  const auto rs = augmentation_record(ada, single);
  REQUIRE(rs.boxes.size() == 1);
  CHECK(rs.boxes[0].first == BoundingBox(1, 1, 4, 4));
  CHECK(rs.boxes[0].second == 1.0);

  const auto rd = augmentation_record(ada, duck());
  REQUIRE(rd.boxes.size() == 2);
  CHECK(rd.boxes[0].first == disjoint_boxes(3)[0]);
  CHECK(rd.boxes[0].second == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rd.boxes[1].first == disjoint_boxes(3)[1]);
  CHECK(rd.boxes[1].second == doctest::Approx(0.5).epsilon(1e-6));

  const ada::testing::TempDir dir("aug");
  const auto data = make_dataset({single, duck()});
  const auto out = export_augmentation(ada, data, dir.file("aug.txt"));
  CHECK_FALSE(out.partial());
  CHECK(out.mean_support() == 1.5);
  const auto back = parse_augmentation(text::read_file(dir.file("aug.txt")), "aug");
  CHECK(back.records == out.records);
  CHECK(format_augmentation(back) == text::read_file(dir.file("aug.txt")));

  CHECK_THROWS_AS(compute_augmentation(model_of(ObjectiveKind::kSoftmax, vec({1})), data), UsageError);
  CHECK_THROWS_AS(parse_augmentation("ada-augmentation 1\nimage = a\n0.5: [0, 0, 1, 1]\n", "x"),
                  DataError);
  CHECK_THROWS_AS(parse_augmentation("nope\n", "x"), DataError);

  AugmentationExport partial;
  partial.records.push_back(rs);
  partial.failures.emplace_back("bad", "did not converge");
  const auto text = format_augmentation(partial);
  CHECK(text.find("partial = true") != std::string::npos);
  const auto reread = parse_augmentation(text, "x");
  CHECK(reread.partial());
  CHECK(reread.failures == partial.failures);
}

TEST_CASE("augmentation weights form distributions on random instances") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 1 + trial % 3;
    const auto ex = random_example(rng, dim, "a");
    const auto r = augmentation_record(model_of(ObjectiveKind::kAda, random_theta(rng, dim, 2.0)), ex);
    double total = 0.0;
    for (const auto& [box, w] : r.boxes) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("evaluate builds per-class reports") {
  std::vector<PredictionRecord> preds(3);
  preds[0].image_id = "a";
  preds[0].box = BoundingBox(0, 0, 10, 10);
  preds[1].image_id = "b";
  preds[1].box = BoundingBox(0, 0, 10, 6);  // IoU 0.6 with its gt
  preds[2].image_id = "c";
  preds[2].box = BoundingBox(5, 5, 6, 6);
  const std::vector<std::pair<std::string, LabeledBox>> gts{
      {"a", {0, BoundingBox(0, 0, 10, 10)}},
      {"b", {0, BoundingBox(0, 0, 10, 10)}},
      {"c", {1, BoundingBox(5, 5, 6, 6)}}};
  const auto report = evaluate(preds, gts, {0.5, 0.7});
  CHECK(report.per_class.at(0) == std::vector<double>{1.0, 0.5});
  CHECK(report.per_class.at(1) == std::vector<double>{1.0, 1.0});
  CHECK(report.mean[0] == 1.0);
  CHECK(report.mean[1] == 0.75);
  const auto table = report.format_table();
  CHECK(table.find("IoU > 0.5") != std::string::npos);
  CHECK(table.find("IoU > 0.7") != std::string::npos);
  CHECK(table.find("75.0") != std::string::npos);
  CHECK(report.to_json().find("\"mean\"") != std::string::npos);

  auto missing = gts;
  missing.push_back({"d", {1, BoundingBox(0, 0, 1, 1)}});
  try {
    evaluate(preds, missing, {0.5});
    FAIL("expected a mismatch error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("'d'") != std::string::npos);
  }
  CHECK_THROWS_AS(evaluate(preds, gts, {}), UsageError);
}
