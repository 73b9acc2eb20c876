#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dynslam/core/point_cloud.hpp"

namespace dynslam {

/// Axis-aligned, world frame.
struct DynamicObjectBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  int class_id = 0;
  std::int64_t frame_id = 0;
  std::uint16_t instance = 0;
  std::size_t point_count = 0;

  bool contains(const Vec3& p) const;
};

struct DynamicMap {
  std::int64_t frame_id = 0;
  PointCloud points;  // world frame
  std::vector<DynamicObjectBox> boxes;
};

/// Snapshot of the current frame's dynamic points. One box per distinct
/// dynamic instance id among the points. `class_ids`, if given, is aligned
/// with the points and decides each box's class by majority (ties to the
/// smaller id).
DynamicMap update_dynamic_map(const PointCloud& dynamic_points, const Pose& pose,
                              std::int64_t frame_id, std::span<const int> class_ids = {});

void write_boxes_json(const std::filesystem::path& path, const DynamicMap& map);

}  // namespace dynslam
