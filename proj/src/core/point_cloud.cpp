#include "dynslam/core/point_cloud.hpp"

#include <algorithm>

namespace dynslam {

std::uint8_t Label::to_byte() const {
  switch (kind) {
    case LabelKind::Unlabeled:
      return 0;
    case LabelKind::Static:
      return 1;
    case LabelKind::Dynamic:
      return static_cast<std::uint8_t>(2 + std::min<std::uint16_t>(instance, 253));
  }
  return 0;
}

Label Label::from_byte(std::uint8_t byte) {
  if (byte == 0) return Label{};
  if (byte == 1) return make_static();
  return make_dynamic(static_cast<std::uint16_t>(byte - 2));
}

PointCloud make_cloud(const std::vector<Vec3>& positions, std::int64_t frame_id,
                      double timestamp) {
  PointCloud cloud;
  cloud.frame_id = frame_id;
  cloud.timestamp = timestamp;
  cloud.points.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    Point p;
    p.position = positions[i];
    p.scan_index = static_cast<std::uint32_t>(i);
    cloud.points.push_back(p);
  }
  return cloud;
}

std::vector<Vec3> positions_of(const PointCloud& cloud) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud.points) out.push_back(p.position);
  return out;
}

bool all_finite(const PointCloud& cloud) {
  return std::all_of(cloud.points.begin(), cloud.points.end(),
                     [](const Point& p) { return p.position.allFinite(); });
}

void reindex(PointCloud& cloud) {
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    cloud.points[i].scan_index = static_cast<std::uint32_t>(i);
  }
}

PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud) {
  PointCloud out = cloud;
  const Mat3 r = pose.rotation_matrix();
  const Vec3& t = pose.translation();
  for (auto& p : out.points) {
    p.position = r * p.position + t;
  }
  return out;
}

}  // namespace dynslam
