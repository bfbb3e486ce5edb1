#include "ada/dataset.hpp"

#include <filesystem>

#include "ada/error.hpp"
#include "ada/image.hpp"
#include "ada/text_format.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace ada;
namespace fs = std::filesystem;

namespace {

std::string slurp_dir(const fs::path& dir) {
  std::string all;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
  std::sort(files.begin(), files.end());
  for (const auto& f : files) all += f.string() + "\n" + text::read_file((dir / f).string());
  return all;
}

}  // namespace

TEST_CASE("synthetic corpora are deterministic") {
  const ada::testing::TempDir a("syn_a"), b("syn_b");
  SyntheticConfig config;
  config.count = 10;
  config.seed = 7;
  write_synthetic_corpus(config, a.file("c"));
  write_synthetic_corpus(config, b.file("c"));
  CHECK(slurp_dir(a.path() / "c") == slurp_dir(b.path() / "c"));

  config.seed = 8;
  write_synthetic_corpus(config, b.file("d"));
  CHECK(slurp_dir(a.path() / "c") != slurp_dir(b.path() / "d"));
}

TEST_CASE("synthetic annotation noise") {
  SyntheticConfig clean;
  clean.count = 40;
  for (const auto& img : generate_synthetic(clean)) {
    CHECK(img.annotated_box == img.true_box);
    CHECK(img.true_box.x_max() <= clean.width);
    CHECK(img.true_box.y_max() <= clean.height);
  }

  SyntheticConfig noisy = clean;
  noisy.noise_pixels = 5.0;
  const auto images = generate_synthetic(noisy);
  const auto reference = generate_synthetic(clean);
  bool moved = false;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& t = images[i].true_box;
    const auto& g = images[i].annotated_box;
    // Pixels do not depend on the noise setting.
    CHECK(images[i].image == reference[i].image);
    CHECK(std::abs(g.x_min() - t.x_min()) <= 5.0);
    CHECK(std::abs(g.y_min() - t.y_min()) <= 5.0);
    CHECK(std::abs(g.x_max() - t.x_max()) <= 5.0);
    CHECK(std::abs(g.y_max() - t.y_max()) <= 5.0);
    moved = moved || !(g == t);
  }
  CHECK(moved);

  SyntheticConfig bad = clean;
  bad.max_size = 100;
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = clean;
  bad.noise_fraction = -0.1;
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("synthetic shapes are brighter than the background inside the true box") {
  SyntheticConfig config;
  config.count = 12;
  for (const auto& img : generate_synthetic(config)) {
    const auto& box = img.true_box;
    const int cx = static_cast<int>((box.x_min() + box.x_max()) / 2);
    const int cy = static_cast<int>((box.y_min() + box.y_max()) / 2);
    CHECK(img.image.gray(cx, cy) > 120.0);
  }
}

TEST_CASE("manifests round-trip and validate") {
  const ada::testing::TempDir dir("manifest");
  SyntheticConfig config;
  config.count = 4;
  config.noise_fraction = 0.1;
  const auto written = write_synthetic_corpus(config, dir.file("corpus"));
  const auto path = dir.file("corpus/manifest.txt");
  const auto loaded = load_manifest(path);
  CHECK_NOTHROW(loaded.validate());
  REQUIRE(loaded.entries.size() == 4);
  CHECK(format_manifest(loaded) == text::read_file(path));
  CHECK(loaded.entries[2].gt == written.entries[2].gt);
  CHECK(loaded.entries[2].true_box.has_value());
  CHECK(fs::exists(loaded.resolve(loaded.entries[0].image_path)));
  CHECK(class_ids(loaded) == std::vector<int>{0, 1, 2});

  auto dup = loaded;
  dup.entries[1].image_id = dup.entries[0].image_id;
  CHECK_THROWS_WITH_AS(dup.validate(), doctest::Contains("duplicate"), DataError);
  auto both = loaded;
  both.entries[0].feature_path = "x.txt";
  CHECK_THROWS_AS(both.validate(), DataError);
  auto gone = loaded;
  gone.entries[0].image_path = "images/none.ppm";
  CHECK_THROWS_WITH_AS(gone.validate(), doctest::Contains("missing file"), DataError);
  CHECK_NOTHROW(gone.validate(false));

  CHECK_THROWS_AS(parse_manifest("ada-manifest 2\n", "m", ""), DataError);
  CHECK_THROWS_AS(parse_manifest("ada-manifest 1\n[image]\nid = a\n", "m", ""), DataError);
  CHECK_THROWS_WITH_AS(parse_manifest("ada-manifest 1\n[image]\nid = a\ncolour = 3\n[end]\n", "m", ""),
                       doctest::Contains("m:4"), DataError);
  CHECK_THROWS_AS(load_manifest(dir.file("nowhere.txt")), DataError);
}

TEST_CASE("build_dataset appends the ground truth only for training") {
  const ada::testing::TempDir dir("build");
  SyntheticConfig config;
  config.count = 6;
  config.noise_fraction = 0.1;
  const auto manifest = write_synthetic_corpus(config, dir.file("c"));
  PipelineConfig pipeline;
  pipeline.proposals = default_synthetic_proposals();

  const auto train = build_dataset(manifest, pipeline, true);
  CHECK_NOTHROW(train.validate());
  REQUIRE(train.size() == 6);
  for (const auto& ex : train.examples) {
    CHECK(ex.proposals[ex.gt_index()].same_coordinates(ex.gt));
    CHECK(ex.features.dim() == ExtractorSpec{}.dim());
    for (Eigen::Index i = 0; i < ex.features.size(); ++i)
      CHECK(ex.features.rows.row(i).norm() == doctest::Approx(1.0));
  }

  const auto test = build_dataset(manifest, pipeline, false, 1);
  REQUIRE(test.size() == 2);
  for (const auto& ex : test.examples) {
    CHECK(ex.class_id == 1);
    CHECK(ex.proposals.size() ==
          grid_proposals(config.width, config.height, pipeline.proposals, ex.image_id).size());
  }

  PipelineConfig threaded = pipeline;
  threaded.jobs = 3;
  const auto again = build_dataset(manifest, threaded, true);
  for (std::size_t i = 0; i < train.size(); ++i)
    CHECK(again.examples[i].features.rows == train.examples[i].features.rows);

  CHECK_THROWS_AS(build_dataset(manifest, pipeline, true, 7), DataError);
}

TEST_CASE("build_dataset reads precomputed features") {
  const ada::testing::TempDir dir("files");
  const std::vector<BoundingBox> boxes{BoundingBox(0, 0, 4, 4), BoundingBox(2, 2, 6, 6),
                                       BoundingBox(5, 5, 9, 9)};
  const ProposalSet props("f0", boxes);
  text::write_file(dir.file("p.txt"), format_proposals(props));
  Eigen::MatrixXd rows(3, 2);
  rows << 3, 4, 1, 0, 0, 2;
  text::write_file(dir.file("f.txt"), format_features(FeatureMatrix{"f0", rows, 0}));
  const std::string text =
      "ada-manifest 1\n[image]\nid = f0\nclass = 0\nfeatures = f.txt\nproposals = p.txt\n"
      "gt = [2, 2, 6, 6]\n[end]\n";
  text::write_file(dir.file("m.txt"), text);
  const auto manifest = load_manifest(dir.file("m.txt"));
  PipelineConfig pipeline;
  pipeline.extractor.kind = ExtractorKind::kFile;
  const auto data = build_dataset(manifest, pipeline, true);
  REQUIRE(data.size() == 1);
  CHECK(data.examples[0].gt_index() == 1);
  CHECK(data.examples[0].features.rows(0, 0) == doctest::Approx(0.6));

  const std::string absent =
      "ada-manifest 1\n[image]\nid = f0\nclass = 0\nfeatures = f.txt\nproposals = p.txt\n"
      "gt = [1, 1, 6, 6]\n[end]\n";
  text::write_file(dir.file("m2.txt"), absent);
  CHECK_THROWS_WITH_AS(build_dataset(load_manifest(dir.file("m2.txt")), pipeline, true),
                       doctest::Contains("ground truth missing"), DataError);
  CHECK_NOTHROW(build_dataset(load_manifest(dir.file("m2.txt")), pipeline, false));
}
