#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dynslam/core/point_cloud.hpp"

namespace dynslam {

struct VoxelKey {
  std::int64_t x = 0, y = 0, z = 0;

  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
};

VoxelKey voxel_key(const Vec3& p, double leaf);

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept;
};

/// Running per-voxel centroid accumulator. Each occupied voxel yields one
/// point: centroid position, mean color over colored members, and a
/// dynamic-dominant label (Dynamic if any member is Dynamic, else Static).
/// Output order follows first insertion into each voxel.
class VoxelAccumulator {
 public:
  explicit VoxelAccumulator(double leaf);

  double leaf() const { return leaf_; }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }

  /// Returns the slot the point landed in.
  std::size_t add(const Point& p);
  void add(const PointCloud& cloud);

  /// Drops voxels whose centroid is farther than radius from center.
  void evict_outside(const Vec3& center, double radius);

  Vec3 centroid(std::size_t slot) const;
  Point point(std::size_t slot) const;
  PointCloud to_cloud() const;

 private:
  struct Slot {
    VoxelKey key;
    Vec3 sum = Vec3::Zero();
    std::uint32_t count = 0;
    std::uint64_t r = 0, g = 0, b = 0;
    std::uint32_t colored = 0;
    bool dynamic = false;
    std::uint16_t instance = 0;
    std::uint32_t first_index = 0;
  };

  double leaf_;
  std::vector<Slot> slots_;
  std::unordered_map<VoxelKey, std::uint32_t, VoxelKeyHash> lookup_;
};

/// One point per occupied voxel of edge `leaf`. Throws std::invalid_argument
/// for a non-positive leaf.
PointCloud voxel_downsample(const PointCloud& cloud, double leaf);

}  // namespace dynslam
