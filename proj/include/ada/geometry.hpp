#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

namespace ada {

// Axis-aligned box in continuous image coordinates; area is
// (x_max - x_min) * (y_max - y_min). Construction rejects empty or inverted
// boxes, so every live instance has strictly positive area.
class BoundingBox {
 public:
  BoundingBox(double x_min, double y_min, double x_max, double y_max,
              std::optional<int> class_id = std::nullopt);

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }
  std::optional<int> class_id() const { return class_id_; }

  // Coordinate equality only; class labels are ignored.
  bool same_coordinates(const BoundingBox& other) const;
  bool operator==(const BoundingBox& other) const = default;

 private:
  double x_min_, y_min_, x_max_, y_max_;
  std::optional<int> class_id_;
};

enum class LossKind { kOverlap, kThresholded };

struct LossSpec {
  LossKind kind = LossKind::kOverlap;
  double alpha = 0.5;  // used by kThresholded only

  static LossSpec overlap() { return {}; }
  static LossSpec thresholded(double alpha);
  void validate() const;
  bool operator==(const LossSpec&) const = default;
};

double iou(const BoundingBox& a, const BoundingBox& b);

// 1 - IoU: zero for identical boxes, one for disjoint boxes.
double overlap_loss(const BoundingBox& a, const BoundingBox& b);

// 1 when IoU < alpha, else 0.
double thresholded_loss(const BoundingBox& a, const BoundingBox& b, double alpha);

double loss(const BoundingBox& a, const BoundingBox& b, const LossSpec& spec);

// M(i, j) = loss(rows[i], cols[j]).
Eigen::MatrixXd loss_matrix(std::span<const BoundingBox> rows,
                            std::span<const BoundingBox> cols,
                            const LossSpec& spec);

}  // namespace ada
