#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynslam/core/voxel_grid.hpp"
#include "dynslam/fusion/camera.hpp"

namespace dynslam {

/// Colored static map in the world frame, one point per voxel.
class GlobalStaticMap {
 public:
  explicit GlobalStaticMap(double leaf = 0.05);

  double leaf() const { return voxels_.leaf(); }
  std::size_t size() const { return voxels_.size(); }
  std::size_t keyframes() const { return keyframes_; }

  /// No-op unless is_keyframe. Otherwise the static points are optionally
  /// recolored from `image` (in-view points only), moved to the world frame by
  /// `pose` and merged into the voxel grid. Dynamic-labeled points are skipped.
  ///
  /// `tainted` optionally flags input points known to come from moving
  /// geometry; the map only records which voxels they reached.
  void update(const PointCloud& static_points, const Pose& pose, bool is_keyframe,
              const ColorImage* image = nullptr, const CameraModel* camera = nullptr,
              std::span<const std::uint8_t> tainted = {});

  PointCloud cloud() const { return voxels_.to_cloud(); }
  /// Map points that received at least one flagged input point.
  std::size_t tainted_count() const;

 private:
  VoxelAccumulator voxels_;
  std::vector<std::uint32_t> taint_;
  std::size_t keyframes_ = 0;
};

GlobalStaticMap update_static_map(GlobalStaticMap map, const PointCloud& static_points,
                                  const Pose& pose, bool is_keyframe);

}  // namespace dynslam
