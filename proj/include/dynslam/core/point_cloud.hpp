#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dynslam/core/pose.hpp"

namespace dynslam {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class LabelKind : std::uint8_t { Unlabeled, Static, Dynamic };

/// Per-point semantic label. Dynamic labels carry an instance id (0 when the
/// instance is unknown).
///
/// Byte encoding used by the frame and label files:
///   0 = unlabeled, 1 = static, 2 + k = dynamic instance k (k clamped to 253).
struct Label {
  LabelKind kind = LabelKind::Unlabeled;
  std::uint16_t instance = 0;

  static constexpr Label make_static() { return Label{LabelKind::Static, 0}; }
  static constexpr Label make_dynamic(std::uint16_t instance = 0) {
    return Label{LabelKind::Dynamic, instance};
  }

  bool is_dynamic() const { return kind == LabelKind::Dynamic; }
  bool is_static() const { return kind == LabelKind::Static; }

  std::uint8_t to_byte() const;
  static Label from_byte(std::uint8_t byte);

  friend bool operator==(const Label&, const Label&) = default;
};

struct Point {
  Vec3 position = Vec3::Zero();
  std::optional<Rgb> color;
  Label label;
  std::uint32_t scan_index = 0;
};

struct PointCloud {
  std::vector<Point> points;
  std::int64_t frame_id = 0;
  double timestamp = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Point& operator[](std::size_t i) const { return points[i]; }
  Point& operator[](std::size_t i) { return points[i]; }

  /// Copy of the header (frame id, timestamp) with no points.
  PointCloud empty_like() const { return PointCloud{{}, frame_id, timestamp}; }
};

/// Builds an unlabeled cloud whose scan indices follow the input order.
PointCloud make_cloud(const std::vector<Vec3>& positions, std::int64_t frame_id = 0,
                      double timestamp = 0.0);

std::vector<Vec3> positions_of(const PointCloud& cloud);

bool all_finite(const PointCloud& cloud);

/// Sets every point's scan index to its position in the cloud.
void reindex(PointCloud& cloud);

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud);

}  // namespace dynslam
