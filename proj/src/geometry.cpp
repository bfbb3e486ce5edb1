#include "ada/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ada/error.hpp"

namespace ada {

BoundingBox::BoundingBox(double x_min, double y_min, double x_max, double y_max,
                         std::optional<int> class_id)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max), class_id_(class_id) {
  const bool finite = std::isfinite(x_min) && std::isfinite(y_min) &&
                      std::isfinite(x_max) && std::isfinite(y_max);
  if (!finite || !(x_min < x_max) || !(y_min < y_max)) {
    std::ostringstream msg;
    msg << "invalid bounding box (" << x_min << ", " << y_min << ", " << x_max << ", "
        << y_max << "): need finite coordinates with x_min < x_max and y_min < y_max";
    throw DataError(msg.str());
  }
}

bool BoundingBox::same_coordinates(const BoundingBox& other) const {
  return x_min_ == other.x_min_ && y_min_ == other.y_min_ && x_max_ == other.x_max_ &&
         y_max_ == other.y_max_;
}

LossSpec LossSpec::thresholded(double alpha) {
  LossSpec spec{LossKind::kThresholded, alpha};
  spec.validate();
  return spec;
}

void LossSpec::validate() const {
  if (kind == LossKind::kThresholded && !(alpha > 0.0 && alpha < 1.0)) {
    throw UsageError("thresholded loss needs 0 < alpha < 1, got " + std::to_string(alpha));
  }
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double ih = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  // Identical boxes must give exactly 1 regardless of rounding in `uni`.
  if (a.same_coordinates(b)) return 1.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double overlap_loss(const BoundingBox& a, const BoundingBox& b) { return 1.0 - iou(a, b); }

double thresholded_loss(const BoundingBox& a, const BoundingBox& b, double alpha) {
  return iou(a, b) < alpha ? 1.0 : 0.0;
}

double loss(const BoundingBox& a, const BoundingBox& b, const LossSpec& spec) {
  switch (spec.kind) {
    case LossKind::kOverlap:
      return overlap_loss(a, b);
    case LossKind::kThresholded:
      return thresholded_loss(a, b, spec.alpha);
  }
  return 0.0;
}

Eigen::MatrixXd loss_matrix(std::span<const BoundingBox> rows,
                            std::span<const BoundingBox> cols, const LossSpec& spec) {
  if (rows.empty() || cols.empty()) throw DataError("loss_matrix needs nonempty box lists");
  spec.validate();
  Eigen::MatrixXd m(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) m(i, j) = loss(rows[i], cols[j], spec);
  return m;
}

}  // namespace ada
