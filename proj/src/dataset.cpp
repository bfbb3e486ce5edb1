#include "ada/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "ada/error.hpp"
#include "ada/image.hpp"
#include "ada/parallel.hpp"
#include "ada/text_format.hpp"

namespace ada {

namespace fs = std::filesystem;

namespace {
constexpr const char* kManifestMagic = "ada-manifest 1";
}

std::string Manifest::resolve(const std::string& path) const {
  if (path.empty()) return path;
  const fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

void Manifest::validate(bool check_files) const {
  if (entries.empty()) throw DataError("manifest lists no images");
  std::set<std::string> ids;
  for (const auto& e : entries) {
    if (e.image_id.empty()) throw DataError("manifest entry without id");
    if (!ids.insert(e.image_id).second) throw DataError("duplicate image id '" + e.image_id + "'");
    if (e.image_path.empty() == e.feature_path.empty())
      throw DataError("image '" + e.image_id + "' needs exactly one of image or features");
    if (!e.feature_path.empty() && e.proposal_path.empty())
      throw DataError("image '" + e.image_id + "' has features but no proposal file");
    if (!check_files) continue;
    for (const auto* p : {&e.image_path, &e.feature_path, &e.proposal_path})
      if (!p->empty() && !fs::exists(resolve(*p)))
        throw DataError("image '" + e.image_id + "': missing file '" + resolve(*p) + "'");
  }
}

Manifest parse_manifest(const std::string& contents, const std::string& context,
                        const std::string& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || text::trim(line) != kManifestMagic)
    throw DataError(context + ": not a manifest (expected '" + kManifestMagic + "' first line)");
  ++line_no;
  std::optional<ManifestEntry> open;
  bool have_gt = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string ctx = context + ":" + std::to_string(line_no);
    const auto view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (view == "[image]") {
      if (open) throw DataError(ctx + ": unterminated [image] block");
      open.emplace();
      have_gt = false;
      continue;
    }
    if (view == "[end]") {
      if (!open) throw DataError(ctx + ": stray [end]");
      if (open->image_id.empty() || !have_gt) throw DataError(ctx + ": entry needs id and gt");
      m.entries.push_back(std::move(*open));
      open.reset();
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw DataError(ctx + ": expected key = value");
    const std::string key(text::trim(view.substr(0, eq)));
    const std::string value(text::trim(view.substr(eq + 1)));
    if (!open) {
      m.metadata.emplace_back(key, value);
      continue;
    }
    if (key == "id") {
      open->image_id = value;
    } else if (key == "class") {
      open->class_id = static_cast<int>(text::parse_int(value, ctx));
    } else if (key == "image") {
      open->image_path = value;
    } else if (key == "features") {
      open->feature_path = value;
    } else if (key == "proposals") {
      open->proposal_path = value;
    } else if (key == "gt") {
      open->gt = text::parse_box(value, ctx);
      have_gt = true;
    } else if (key == "true_box") {
      open->true_box = text::parse_box(value, ctx);
    } else {
      throw DataError(ctx + ": unknown key '" + key + "'");
    }
  }
  if (open) throw DataError(context + ": truncated manifest (missing [end])");
  return m;
}

Manifest load_manifest(const std::string& path) {
  const auto parent = fs::path(path).parent_path().string();
  return parse_manifest(text::read_file(path), path, parent);
}

std::string format_manifest(const Manifest& m) {
  std::ostringstream out;
  out << kManifestMagic << "\n";
  for (const auto& [k, v] : m.metadata) out << k << " = " << v << "\n";
  for (const auto& e : m.entries) {
    out << "[image]\n";
    out << "id = " << e.image_id << "\n";
    out << "class = " << e.class_id << "\n";
    if (!e.image_path.empty()) out << "image = " << e.image_path << "\n";
    if (!e.feature_path.empty()) out << "features = " << e.feature_path << "\n";
    if (!e.proposal_path.empty()) out << "proposals = " << e.proposal_path << "\n";
    out << "gt = " << text::format_box(e.gt) << "\n";
    if (e.true_box) out << "true_box = " << text::format_box(*e.true_box) << "\n";
    out << "[end]\n";
  }
  return out.str();
}

Manifest write_synthetic_corpus(const SyntheticConfig& config, const std::string& directory) {
  config.validate();
  std::error_code ec;
  fs::create_directories(fs::path(directory) / "images", ec);
  if (ec) throw DataError("cannot create '" + directory + "': " + ec.message());
  Manifest m;
  m.base_dir = directory;
  m.metadata = {{"generator", "synthetic"},
                {"seed", std::to_string(config.seed)},
                {"count", std::to_string(config.count)},
                {"width", std::to_string(config.width)},
                {"height", std::to_string(config.height)},
                {"classes", std::to_string(config.classes)},
                {"noise_pixels", text::format_double(config.noise_pixels)},
                {"noise_fraction", text::format_double(config.noise_fraction)}};
  for (std::size_t i = 0; i < config.count; ++i) {
    const auto img = generate_synthetic_image(config, i);
    const std::string rel = "images/" + img.image_id + ".ppm";
    write_ppm((fs::path(directory) / rel).string(), img.image);
    ManifestEntry e;
    e.image_id = img.image_id;
    e.class_id = img.class_id;
    e.image_path = rel;
    e.gt = BoundingBox(img.annotated_box.x_min(), img.annotated_box.y_min(),
                       img.annotated_box.x_max(), img.annotated_box.y_max());
    e.true_box = BoundingBox(img.true_box.x_min(), img.true_box.y_min(), img.true_box.x_max(),
                             img.true_box.y_max());
    m.entries.push_back(std::move(e));
  }
  text::write_file((fs::path(directory) / "manifest.txt").string(), format_manifest(m));
  return m;
}

ProposalConfig default_synthetic_proposals() {
  ProposalConfig config;
  config.generator = ProposalGenerator::kGrid;
  config.scales.clear();
  for (double w : {12.0, 20.0, 28.0})
    for (double h : {12.0, 20.0, 28.0}) config.scales.emplace_back(w, h);
  config.stride_x = config.stride_y = 6;
  config.k = 400;
  return config;
}

namespace {

Example prepare_example(const Manifest& manifest, const ManifestEntry& entry,
                        const PipelineConfig& config, bool training) {
  std::optional<ProposalSet> proposals;
  if (!entry.proposal_path.empty())
    proposals = load_proposals(manifest.resolve(entry.proposal_path), entry.image_id).proposals;

  FeatureMatrix features;
  std::size_t gt_index = 0;
  if (!entry.feature_path.empty()) {
    features = load_features(manifest.resolve(entry.feature_path), *proposals);
    if (training) {
      const auto idx = proposals->find(entry.gt);
      if (!idx)
        throw DataError("image '" + entry.image_id +
                        "': ground truth missing from its proposal file, and precomputed "
                        "features cannot be extended");
      gt_index = *idx;
    }
  } else {
    const Image image = read_ppm(manifest.resolve(entry.image_path));
    if (!proposals) {
      if (config.proposals.generator == ProposalGenerator::kFile)
        throw DataError("image '" + entry.image_id +
                        "': proposal generator is 'file' but the manifest lists no proposals");
      if (config.proposals.generator == ProposalGenerator::kJitter) {
        auto jitter = config.proposals;
        jitter.rng_seed ^= std::hash<std::string>{}(entry.image_id);
        proposals = jitter_proposals(entry.gt, jitter, std::pair{double(image.width),
                                                                 double(image.height)},
                                     entry.image_id);
      } else {
        proposals = grid_proposals(image.width, image.height, config.proposals, entry.image_id);
      }
    }
    if (training) gt_index = proposals->ensure_contains(entry.gt);
    auto spec = config.extractor;
    if (spec.kind == ExtractorKind::kFile)
      throw UsageError("image '" + entry.image_id + "' has pixels but the extractor is 'file'");
    features = extract_features(image, *proposals, spec);
  }
  features.image_id = entry.image_id;
  features.gt_index = gt_index;
  if (config.extractor.normalize) features = normalize_rows(std::move(features));
  features.validate();
  return Example{entry.image_id, entry.class_id, std::move(*proposals), std::move(features),
                 entry.gt};
}

}  // namespace

Dataset build_dataset(const Manifest& manifest, const PipelineConfig& config, bool training,
                      std::optional<int> class_filter) {
  std::vector<const ManifestEntry*> selected;
  for (const auto& e : manifest.entries)
    if (!class_filter || e.class_id == *class_filter) selected.push_back(&e);
  if (selected.empty()) throw DataError("no manifest entries for the requested class");
  std::vector<std::optional<Example>> built(selected.size());
  parallel_for(selected.size(), config.jobs, [&](std::size_t i) {
    built[i] = prepare_example(manifest, *selected[i], config, training);
  });
  Dataset data;
  data.extractor = config.extractor;
  for (auto& ex : built) data.examples.push_back(std::move(*ex));
  return data;
}

std::vector<int> class_ids(const Manifest& manifest) {
  std::set<int> ids;
  for (const auto& e : manifest.entries) ids.insert(e.class_id);
  return {ids.begin(), ids.end()};
}

}  // namespace ada
