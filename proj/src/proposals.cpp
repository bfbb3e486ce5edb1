#include "ada/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ada/error.hpp"
#include "ada/text_format.hpp"

namespace ada {

ProposalSet::ProposalSet(std::string image_id, std::vector<BoundingBox> boxes,
                         std::optional<std::vector<double>> scores)
    : image_id_(std::move(image_id)), boxes_(std::move(boxes)), scores_(std::move(scores)) {
  if (boxes_.empty()) throw DataError("empty label space for image '" + image_id_ + "'");
  if (scores_) {
    if (scores_->size() != boxes_.size())
      throw DataError("proposal scores length does not match box count");
    for (double s : *scores_)
      if (!(s >= 0.0) || !std::isfinite(s)) throw DataError("proposal scores must be >= 0");
  }
  for (std::size_t i = 0; i < boxes_.size(); ++i)
    for (std::size_t j = i + 1; j < boxes_.size(); ++j)
      if (boxes_[i].same_coordinates(boxes_[j]))
        throw DataError("duplicate proposal " + text::format_box(boxes_[j]) + " in '" +
                        image_id_ + "'");
}

ProposalSet ProposalSet::deduplicated(std::string image_id, std::vector<BoundingBox> boxes,
                                      std::optional<std::vector<double>> scores,
                                      std::size_t* dropped) {
  std::vector<BoundingBox> kept;
  std::optional<std::vector<double>> kept_scores;
  if (scores) kept_scores.emplace();
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const BoundingBox& b) {
      return b.same_coordinates(boxes[i]);
    });
    if (dup) continue;
    kept.push_back(boxes[i]);
    if (scores && i < scores->size()) kept_scores->push_back((*scores)[i]);
  }
  if (dropped) *dropped = boxes.size() - kept.size();
  return ProposalSet(std::move(image_id), std::move(kept), std::move(kept_scores));
}

std::optional<std::size_t> ProposalSet::find(const BoundingBox& box) const {
  for (std::size_t i = 0; i < boxes_.size(); ++i)
    if (boxes_[i].same_coordinates(box)) return i;
  return std::nullopt;
}

std::size_t ProposalSet::ensure_contains(const BoundingBox& box) {
  if (auto idx = find(box)) return *idx;
  boxes_.push_back(box);
  if (scores_) scores_->push_back(0.0);
  return boxes_.size() - 1;
}

void ProposalConfig::validate() const {
  if (k < 1) throw UsageError("proposal cap k must be >= 1");
  if (!(max_translation >= 0.0) || !(max_scale >= 0.0) || max_scale >= 1.0)
    throw UsageError("jitter ranges must be nonnegative (scale range below 1)");
  if (generator == ProposalGenerator::kGrid) {
    if (!(stride_x > 0.0) || !(stride_y > 0.0)) throw UsageError("grid strides must be > 0");
    for (auto [w, h] : scales)
      if (!(w > 0.0) || !(h > 0.0)) throw UsageError("grid scales must be > 0");
  }
  if (generator == ProposalGenerator::kJitter && samples < 1)
    throw UsageError("jitter sample count must be >= 1");
}

ProposalSet grid_proposals(double image_width, double image_height,
                           const ProposalConfig& config, std::string image_id) {
  if (!(image_width > 0.0) || !(image_height > 0.0))
    throw DataError("image dimensions must be positive");
  config.validate();
  std::vector<BoundingBox> boxes;
  constexpr double kSlack = 1e-9;
  for (auto [w, h] : config.scales) {
    const double bw = std::min(w, image_width);
    const double bh = std::min(h, image_height);
    for (double y = 0.0; y + bh <= image_height + kSlack; y += config.stride_y) {
      for (double x = 0.0; x + bw <= image_width + kSlack; x += config.stride_x) {
        boxes.emplace_back(x, y, std::min(x + bw, image_width), std::min(y + bh, image_height));
      }
    }
  }
  std::vector<BoundingBox> unique;
  for (const auto& b : boxes) {
    if (unique.size() >= config.k) break;
    const bool dup = std::any_of(unique.begin(), unique.end(),
                                 [&](const BoundingBox& u) { return u.same_coordinates(b); });
    if (!dup) unique.push_back(b);
  }
  if (unique.empty()) throw DataError("empty label space: grid configuration yields no boxes");
  return ProposalSet(std::move(image_id), std::move(unique));
}

ProposalSet jitter_proposals(const BoundingBox& gt, const ProposalConfig& config,
                             std::optional<std::pair<double, double>> bounds,
                             std::string image_id) {
  config.validate();
  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> shift(-config.max_translation, config.max_translation);
  std::uniform_real_distribution<double> scale(1.0 - config.max_scale, 1.0 + config.max_scale);

  std::vector<BoundingBox> boxes{gt};
  const double cx = 0.5 * (gt.x_min() + gt.x_max());
  const double cy = 0.5 * (gt.y_min() + gt.y_max());
  for (std::size_t s = 1; s < config.samples; ++s) {
    const double dx = config.max_translation > 0 ? shift(rng) : 0.0;
    const double dy = config.max_translation > 0 ? shift(rng) : 0.0;
    const double sw = config.max_scale > 0 ? scale(rng) : 1.0;
    const double sh = config.max_scale > 0 ? scale(rng) : 1.0;
    double x0 = cx + dx - 0.5 * gt.width() * sw;
    double x1 = cx + dx + 0.5 * gt.width() * sw;
    double y0 = cy + dy - 0.5 * gt.height() * sh;
    double y1 = cy + dy + 0.5 * gt.height() * sh;
    if (bounds) {
      x0 = std::clamp(x0, 0.0, bounds->first);
      x1 = std::clamp(x1, 0.0, bounds->first);
      y0 = std::clamp(y0, 0.0, bounds->second);
      y1 = std::clamp(y1, 0.0, bounds->second);
    }
    if (!(x0 < x1) || !(y0 < y1)) continue;
    boxes.emplace_back(x0, y0, x1, y1);
  }
  auto set = ProposalSet::deduplicated(std::move(image_id), std::move(boxes));
  if (set.size() > config.k) {
    std::vector<BoundingBox> head(set.boxes().begin(),
                                  set.boxes().begin() + static_cast<std::ptrdiff_t>(config.k));
    return ProposalSet(set.image_id(), std::move(head));
  }
  return set;
}

LoadedProposals load_proposals(const std::string& path, std::string image_id) {
  const std::string contents = text::read_file(path);
  std::istringstream in(contents);
  std::vector<BoundingBox> boxes;
  std::vector<double> scores;
  bool any_score = false, any_missing = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = text::trim(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos)
      view = text::trim(view.substr(0, hash));
    if (view.empty()) continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    const auto fields = text::split(view, ",");
    if (fields.size() != 4 && fields.size() != 5)
      throw DataError(ctx + ": expected x_min,y_min,x_max,y_max[,score]");
    double v[4];
    for (int i = 0; i < 4; ++i) v[i] = text::parse_double(fields[i], ctx);
    try {
      boxes.emplace_back(v[0], v[1], v[2], v[3]);
    } catch (const DataError& e) {
      throw DataError(ctx + ": " + e.what());
    }
    if (fields.size() == 5) {
      const double s = text::parse_double(fields[4], ctx);
      if (s < 0.0) throw DataError(ctx + ": negative score");
      scores.push_back(s);
      any_score = true;
    } else {
      scores.push_back(0.0);
      any_missing = true;
    }
  }
  if (boxes.empty()) throw DataError(path + ": proposal file contains no boxes");
  if (any_score && any_missing)
    throw DataError(path + ": either every row or no row may carry a score");
  if (image_id.empty()) image_id = path;
  std::size_t dropped = 0;
  auto set = ProposalSet::deduplicated(
      std::move(image_id), std::move(boxes),
      any_score ? std::optional<std::vector<double>>(std::move(scores)) : std::nullopt, &dropped);
  return {std::move(set), dropped};
}

std::string format_proposals(const ProposalSet& proposals) {
  std::string out;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const auto& b = proposals[i];
    out += text::format_double(b.x_min()) + "," + text::format_double(b.y_min()) + "," +
           text::format_double(b.x_max()) + "," + text::format_double(b.y_max());
    if (proposals.scores()) out += "," + text::format_double((*proposals.scores())[i]);
    out += '\n';
  }
  return out;
}

FilteredProposals filter_by_iou(const ProposalSet& proposals, const BoundingBox& gt,
                                double threshold) {
  FilteredProposals out;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    if (iou(proposals[i], gt) > threshold) {
      out.indices.push_back(i);
      out.boxes.push_back(proposals[i]);
    }
  }
  return out;
}

}  // namespace ada
