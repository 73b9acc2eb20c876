#pragma once

#include <vector>

#include "dynslam/core/spatial_index.hpp"
#include "dynslam/core/voxel_grid.hpp"
#include "dynslam/odometry/features.hpp"

namespace dynslam {

struct LocalMapConfig {
  double leaf = 0.1;             // voxel merge of accumulated features
  double window_radius = 30.0;   // features farther than this from the sensor are dropped
};

/// Edge and planar feature points in the world frame, voxel-merged, with a
/// spatial index over each set. The indices are rebuilt on every update.
class LocalFeatureMap {
 public:
  explicit LocalFeatureMap(const LocalMapConfig& config = {});

  /// Transforms the features by `pose` (sensor -> world), merges them in and
  /// evicts voxels outside the window around the sensor position.
  void update(const FeatureSet& features, const Pose& pose);

  /// Inserts world-frame points directly.
  void insert(const std::vector<Vec3>& edges, const std::vector<Vec3>& planars,
              const Vec3& sensor_position);

  const std::vector<Vec3>& edge_points() const { return edge_points_; }
  const std::vector<Vec3>& planar_points() const { return planar_points_; }
  const SpatialIndex& edge_index() const { return edge_index_; }
  const SpatialIndex& planar_index() const { return planar_index_; }
  std::size_t edge_count() const { return edge_points_.size(); }
  std::size_t planar_count() const { return planar_points_.size(); }
  bool empty() const { return edge_points_.empty() && planar_points_.empty(); }
  const LocalMapConfig& config() const { return config_; }

 private:
  void rebuild(const Vec3& sensor_position);

  LocalMapConfig config_;
  VoxelAccumulator edges_;
  VoxelAccumulator planars_;
  std::vector<Vec3> edge_points_, planar_points_;
  SpatialIndex edge_index_, planar_index_;
};

/// Functional form of LocalFeatureMap::update.
LocalFeatureMap update_local_map(LocalFeatureMap map, const FeatureSet& features,
                                 const Pose& pose);

}  // namespace dynslam
