#include "ada/features.hpp"

#include <random>

#include "ada/error.hpp"
#include "ada/text_format.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace ada;

namespace {

Image constant_image(int w, int h, std::uint8_t value) {
  Image img(w, h);
  std::fill(img.rgb.begin(), img.rgb.end(), value);
  return img;
}

Image noise_image(int w, int h, std::uint64_t seed) {
  Image img(w, h);
  std::mt19937_64 rng(seed);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

ExtractorSpec spec_of(ExtractorKind kind, int bins = 8) {
  ExtractorSpec spec;
  spec.kind = kind;
  spec.bins = bins;
  return spec;
}

}  // namespace

TEST_CASE("geometry extractor") {
  const Image img = constant_image(100, 100, 7);
  const ProposalSet set("g", {BoundingBox(0, 0, 100, 100), BoundingBox(0, 0, 10, 10)});
  const auto fm = extract_features(img, set, spec_of(ExtractorKind::kGeometry));
  REQUIRE(fm.dim() == 6);
  const std::vector<double> full{0.5, 0.5, 1, 1, 0, 1};
  const std::vector<double> small{0.05, 0.05, 0.1, 0.1, 0, 0.01};
  for (int c = 0; c < 6; ++c) {
    CHECK(fm.rows(0, c) == doctest::Approx(full[c]).epsilon(1e-15));
    CHECK(fm.rows(1, c) == doctest::Approx(small[c]).epsilon(1e-15));
  }
}

TEST_CASE("histogram extractor") {
  const Image img = constant_image(20, 20, 200);
  const ProposalSet set("h", {BoundingBox(0, 0, 20, 20), BoundingBox(3.2, 4.7, 9.1, 5.2)});
  const auto fm = extract_features(img, set, spec_of(ExtractorKind::kHistogram, 8));
  REQUIRE(fm.dim() == 8);
  for (Eigen::Index r = 0; r < 2; ++r) {
    CHECK(fm.rows.row(r).sum() == doctest::Approx(1.0));
    CHECK(fm.rows(r, 200 * 8 / 256) == 1.0);
  }
}

TEST_CASE("context extractor separates box and ring content") {
  Image img = constant_image(40, 40, 0);
  for (int y = 10; y < 20; ++y)
    for (int x = 10; x < 20; ++x) std::fill_n(img.pixel(x, y), 3, 255);
  const ProposalSet set("c", {BoundingBox(10, 10, 20, 20), BoundingBox(5, 5, 25, 25)});
  const auto fm = extract_features(img, set, spec_of(ExtractorKind::kContext, 4));
  REQUIRE(fm.dim() == 2 * 4 + 6);
  CHECK(fm.rows(0, 3) == 1.0);  // tight box: all bright inside
  CHECK(fm.rows(0, 4) == 1.0);  // ring: all dark
  CHECK(fm.rows(1, 3) == doctest::Approx(0.25));
}

TEST_CASE("extractor errors") {
  const Image img = constant_image(10, 10, 1);
  const ProposalSet outside("o", {BoundingBox(5, 5, 11, 9)});
  CHECK_THROWS_AS(extract_features(img, outside, spec_of(ExtractorKind::kGeometry)), DataError);
  const ProposalSet inside("i", {BoundingBox(0, 0, 5, 5)});
  CHECK_THROWS_AS(extract_features(img, inside, spec_of(ExtractorKind::kFile)), UsageError);
  CHECK_THROWS_AS(extract_features(img, inside, spec_of(ExtractorKind::kHistogram, 1)),
                  UsageError);
  CHECK_THROWS_AS(extract_features(Image{}, inside, spec_of(ExtractorKind::kGeometry)),
                  DataError);
}

TEST_CASE("extractors are bitwise deterministic") {
  const Image img = noise_image(32, 24, 9);
  std::mt19937_64 rng(1);
  std::vector<BoundingBox> boxes;
  for (int i = 0; i < 40; ++i) {
    auto b = testing::random_box(rng, 23);
    boxes.push_back(b);
  }
  const auto set = ProposalSet::deduplicated("d", boxes);
  for (auto kind : {ExtractorKind::kGeometry, ExtractorKind::kHistogram, ExtractorKind::kContext}) {
    const auto a = extract_features(img, set, spec_of(kind, 6));
    const auto b = extract_features(img, set, spec_of(kind, 6));
    CHECK(a.rows == b.rows);
    CHECK(a.rows.allFinite());
  }
}

TEST_CASE("feature files") {
  testing::TempDir dir("features");
  const ProposalSet three("t", {BoundingBox(0, 0, 1, 1), BoundingBox(1, 1, 2, 2),
                                BoundingBox(2, 2, 3, 3)});
  const auto path = dir.file("f.csv");

  text::write_file(path, "dim=2\n1,2\n3,4\n5,6.5\n");
  const auto fm = load_features(path, three);
  CHECK(fm.dim() == 2);
  CHECK(fm.size() == 3);
  CHECK(fm.rows(2, 1) == 6.5);
  CHECK(format_features(fm) == "dim=2\n1,2\n3,4\n5,6.5\n");

  text::write_file(path, "dim=2\n1,2\n3,4\n");
  CHECK_THROWS_WITH_AS(load_features(path, three), doctest::Contains("2 feature rows"), DataError);

  text::write_file(path, "dim=2\n1,2\n3,NaN\n5,6\n");
  CHECK_THROWS_WITH_AS(load_features(path, three), doctest::Contains("f.csv:3 column 2"),
                       DataError);

  text::write_file(path, "dim=2\n1,2\n3\n5,6\n");
  CHECK_THROWS_WITH_AS(load_features(path, three), doctest::Contains("ragged"), DataError);

  text::write_file(path, "1,2\n");
  CHECK_THROWS_AS(load_features(path, three), DataError);
}

TEST_CASE("potentials") {
  FeatureMatrix fm;
  fm.rows = Eigen::MatrixXd::Random(5, 3);
  fm.gt_index = 2;
  CHECK(potentials(Eigen::VectorXd::Zero(3), fm).isZero(0.0));
  const Eigen::VectorXd psi = potentials(Eigen::VectorXd::Random(3), fm);
  CHECK(psi[2] == 0.0);

  FeatureMatrix shifted;
  shifted.rows = Eigen::MatrixXd::Zero(2, 3);
  shifted.rows(1, 0) = 0.75;
  const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(3, 0);
  CHECK(potentials(e0, shifted)[1] == 0.75);

  CHECK_THROWS_AS(potentials(Eigen::VectorXd::Zero(4), fm), DataError);
}

TEST_CASE("potentials are linear in theta and vanish at the ground truth") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const int d = 1 + static_cast<int>(rng() % 8);
    FeatureMatrix fm;
    fm.rows.resize(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) fm.rows(i, j) = normal(rng);
    fm.gt_index = rng() % n;
    Eigen::VectorXd t1(d), t2(d);
    for (int j = 0; j < d; ++j) {
      t1[j] = normal(rng);
      t2[j] = normal(rng);
    }
    const double a = normal(rng), b = normal(rng);
    const Eigen::VectorXd lhs = potentials(a * t1 + b * t2, fm);
    const Eigen::VectorXd rhs = a * potentials(t1, fm) + b * potentials(t2, fm);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(lhs[static_cast<Eigen::Index>(fm.gt_index)] == 0.0);
  }
}

TEST_CASE("normalize_rows") {
  FeatureMatrix fm;
  fm.rows.resize(3, 2);
  fm.rows << 3, 4, 0, 0, 0.6, 0.8;
  fm.gt_index = 1;
  const auto out = normalize_rows(fm);
  CHECK(out.rows(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(out.rows(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(out.rows.row(1).isZero(0.0));
  CHECK((out.rows.row(2) - fm.rows.row(2)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(out.gt_index == 1);

  const Eigen::MatrixXd random = Eigen::MatrixXd::Random(20, 7);
  FeatureMatrix r;
  r.rows = random;
  const auto normalized = normalize_rows(r);
  for (Eigen::Index i = 0; i < 20; ++i)
    CHECK(std::abs(normalized.rows.row(i).norm() - 1.0) <= 1e-9);
}
