#include "ada/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ada/error.hpp"
#include "ada/text_format.hpp"

namespace ada {

void FeatureMatrix::validate() const {
  if (rows.rows() == 0 || rows.cols() == 0) throw DataError(image_id + ": empty feature matrix");
  if (gt_index >= static_cast<std::size_t>(rows.rows()))
    throw DataError(image_id + ": gt_index out of range");
  if (!rows.allFinite()) throw DataError(image_id + ": non-finite feature entries");
}

void ExtractorSpec::validate() const {
  if ((kind == ExtractorKind::kHistogram || kind == ExtractorKind::kContext) && bins < 2)
    throw UsageError("histogram extractor needs at least 2 bins");
  if (kind == ExtractorKind::kFile && path.empty() && false)
    throw UsageError("file extractor needs a path");
}

int ExtractorSpec::dim() const {
  switch (kind) {
    case ExtractorKind::kGeometry:
      return kGeometryDim;
    case ExtractorKind::kHistogram:
      return bins;
    case ExtractorKind::kContext:
      return 2 * bins + kGeometryDim;
    case ExtractorKind::kFile:
      return -1;
  }
  return -1;
}

std::string to_string(ExtractorKind kind) {
  switch (kind) {
    case ExtractorKind::kGeometry:
      return "geometry";
    case ExtractorKind::kHistogram:
      return "histogram";
    case ExtractorKind::kContext:
      return "context";
    case ExtractorKind::kFile:
      return "file";
  }
  return "?";
}

ExtractorKind parse_extractor_kind(const std::string& name) {
  if (name == "geometry") return ExtractorKind::kGeometry;
  if (name == "histogram") return ExtractorKind::kHistogram;
  if (name == "context") return ExtractorKind::kContext;
  if (name == "file") return ExtractorKind::kFile;
  throw UsageError("unknown extractor '" + name + "'");
}

namespace {

struct PixelRange {
  int x0, x1, y0, y1;  // half-open
  bool empty() const { return x0 >= x1 || y0 >= y1; }
};

// Pixels whose centers fall inside [lo, hi); at least one pixel for any
// positive-extent interval inside the image.
std::pair<int, int> pixel_span(double lo, double hi, int limit) {
  int a = static_cast<int>(std::ceil(lo - 0.5));
  int b = static_cast<int>(std::ceil(hi - 0.5));
  a = std::clamp(a, 0, limit);
  b = std::clamp(b, 0, limit);
  if (a >= b) {
    a = std::clamp(static_cast<int>(std::floor(0.5 * (lo + hi))), 0, limit - 1);
    b = a + 1;
  }
  return {a, b};
}

PixelRange pixels_of(const BoundingBox& box, const Image& image) {
  auto [x0, x1] = pixel_span(box.x_min(), box.x_max(), image.width);
  auto [y0, y1] = pixel_span(box.y_min(), box.y_max(), image.height);
  return {x0, x1, y0, y1};
}

int bin_of(double gray, int bins) {
  return std::min(bins - 1, static_cast<int>(gray * bins / 256.0));
}

void add_histogram(const Image& image, const PixelRange& r, int bins,
                   Eigen::Ref<Eigen::VectorXd> out, const PixelRange* exclude = nullptr) {
  out.setZero();
  double total = 0.0;
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      if (exclude && x >= exclude->x0 && x < exclude->x1 && y >= exclude->y0 && y < exclude->y1)
        continue;
      out[bin_of(image.gray(x, y), bins)] += 1.0;
      total += 1.0;
    }
  }
  if (total > 0.0) out /= total;
}

void geometry_row(const BoundingBox& box, double width, double height,
                  Eigen::Ref<Eigen::VectorXd> out) {
  out[0] = 0.5 * (box.x_min() + box.x_max()) / width;
  out[1] = 0.5 * (box.y_min() + box.y_max()) / height;
  out[2] = box.width() / width;
  out[3] = box.height() / height;
  out[4] = std::log(box.width() / box.height());
  out[5] = box.area() / (width * height);
}

}  // namespace

FeatureMatrix extract_features(const Image& image, const ProposalSet& proposals,
                               const ExtractorSpec& spec) {
  spec.validate();
  if (image.empty()) throw DataError("cannot extract features from an empty image");
  if (spec.kind == ExtractorKind::kFile)
    throw UsageError("file features are loaded with load_features, not extracted");
  constexpr double kTol = 1e-9;
  for (const auto& b : proposals.boxes()) {
    if (b.x_min() < -kTol || b.y_min() < -kTol || b.x_max() > image.width + kTol ||
        b.y_max() > image.height + kTol)
      throw DataError(proposals.image_id() + ": box " + text::format_box(b) +
                      " lies outside the image");
  }
  const double w = image.width, h = image.height;
  FeatureMatrix fm;
  fm.image_id = proposals.image_id();
  fm.rows.resize(static_cast<Eigen::Index>(proposals.size()), spec.dim());
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const auto& box = proposals[i];
    Eigen::VectorXd row(spec.dim());
    switch (spec.kind) {
      case ExtractorKind::kGeometry:
        geometry_row(box, w, h, row);
        break;
      case ExtractorKind::kHistogram:
        add_histogram(image, pixels_of(box, image), spec.bins, row);
        break;
      case ExtractorKind::kContext: {
        const PixelRange inner = pixels_of(box, image);
        // Ring: the box grown by half its size on every side, minus the box.
        const double gx = 0.5 * box.width(), gy = 0.5 * box.height();
        const PixelRange outer{
            std::max(0, static_cast<int>(std::ceil(box.x_min() - gx - 0.5))),
            std::min(image.width, static_cast<int>(std::ceil(box.x_max() + gx - 0.5))),
            std::max(0, static_cast<int>(std::ceil(box.y_min() - gy - 0.5))),
            std::min(image.height, static_cast<int>(std::ceil(box.y_max() + gy - 0.5)))};
        add_histogram(image, inner, spec.bins, row.head(spec.bins));
        add_histogram(image, outer, spec.bins, row.segment(spec.bins, spec.bins), &inner);
        geometry_row(box, w, h, row.tail(kGeometryDim));
        break;
      }
      case ExtractorKind::kFile:
        break;
    }
    fm.rows.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return fm;
}

FeatureMatrix load_features(const std::string& path, const ProposalSet& proposals) {
  const std::string contents = text::read_file(path);
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  long long dim = -1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    if (dim < 0) {
      if (view.substr(0, 4) != "dim=") throw DataError(ctx + ": expected header dim=<D>");
      dim = text::parse_int(view.substr(4), ctx);
      if (dim < 1) throw DataError(ctx + ": dimension must be positive");
      continue;
    }
    const auto fields = text::split(view, ",");
    if (static_cast<long long>(fields.size()) != dim)
      throw DataError(ctx + ": ragged row with " + std::to_string(fields.size()) +
                      " values, expected " + std::to_string(dim));
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c)
      row.push_back(text::parse_double(fields[c], ctx + " column " + std::to_string(c + 1)));
    rows.push_back(std::move(row));
  }
  if (dim < 0) throw DataError(path + ": missing dim header");
  if (rows.size() != proposals.size())
    throw DataError(path + ": " + std::to_string(rows.size()) + " feature rows for " +
                    std::to_string(proposals.size()) + " proposals");
  FeatureMatrix fm;
  fm.image_id = proposals.image_id();
  fm.rows.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (long long c = 0; c < dim; ++c) fm.rows(static_cast<Eigen::Index>(r), c) = rows[r][c];
  return fm;
}

std::string format_features(const FeatureMatrix& features) {
  std::string out = "dim=" + std::to_string(features.dim()) + "\n";
  for (Eigen::Index r = 0; r < features.rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < features.rows.cols(); ++c) {
      if (c) out += ',';
      out += text::format_double(features.rows(r, c));
    }
    out += '\n';
  }
  return out;
}

Eigen::VectorXd potentials(const Eigen::VectorXd& theta, const FeatureMatrix& features) {
  return potentials(theta, features, features.gt_index);
}

Eigen::VectorXd potentials(const Eigen::VectorXd& theta, const FeatureMatrix& features,
                           std::size_t reference) {
  if (theta.size() != features.dim())
    throw DataError("theta has dimension " + std::to_string(theta.size()) +
                    " but features have dimension " + std::to_string(features.dim()));
  if (reference >= static_cast<std::size_t>(features.size()))
    throw DataError("potential reference row out of range");
  const auto ref = features.rows.row(static_cast<Eigen::Index>(reference));
  Eigen::VectorXd psi(features.size());
  for (Eigen::Index i = 0; i < features.size(); ++i)
    psi[i] = (features.rows.row(i) - ref).dot(theta.transpose());
  return psi;
}

Eigen::VectorXd linear_scores(const Eigen::VectorXd& theta, const FeatureMatrix& features) {
  if (theta.size() != features.dim())
    throw DataError("theta has dimension " + std::to_string(theta.size()) +
                    " but features have dimension " + std::to_string(features.dim()));
  return features.rows * theta;
}

FeatureMatrix normalize_rows(FeatureMatrix features) {
  for (Eigen::Index i = 0; i < features.rows.rows(); ++i) {
    const double n = features.rows.row(i).norm();
    if (n > 0.0) features.rows.row(i) /= n;
  }
  return features;
}

}  // namespace ada
