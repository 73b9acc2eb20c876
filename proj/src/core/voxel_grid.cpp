#include "dynslam/core/voxel_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace dynslam {

VoxelKey voxel_key(const Vec3& p, double leaf) {
  return VoxelKey{static_cast<std::int64_t>(std::floor(p.x() / leaf)),
                  static_cast<std::int64_t>(std::floor(p.y() / leaf)),
                  static_cast<std::int64_t>(std::floor(p.z() / leaf))};
}

std::size_t VoxelKeyHash::operator()(const VoxelKey& k) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(k.x) * 73856093ULL;
  h ^= static_cast<std::uint64_t>(k.y) * 19349669ULL;
  h ^= static_cast<std::uint64_t>(k.z) * 83492791ULL;
  return static_cast<std::size_t>(h ^ (h >> 29));
}

VoxelAccumulator::VoxelAccumulator(double leaf) : leaf_(leaf) {
  if (!(leaf > 0.0) || !std::isfinite(leaf)) {
    throw std::invalid_argument("voxel leaf size must be positive");
  }
}

std::size_t VoxelAccumulator::add(const Point& p) {
  const VoxelKey key = voxel_key(p.position, leaf_);
  auto [it, inserted] = lookup_.try_emplace(key, static_cast<std::uint32_t>(slots_.size()));
  if (inserted) {
    Slot s;
    s.key = key;
    s.first_index = p.scan_index;
    slots_.push_back(s);
  }
  Slot& s = slots_[it->second];
  s.sum += p.position;
  ++s.count;
  if (p.color) {
    s.r += p.color->r;
    s.g += p.color->g;
    s.b += p.color->b;
    ++s.colored;
  }
  if (p.label.is_dynamic() && !s.dynamic) {
    s.dynamic = true;
    s.instance = p.label.instance;
  }
  return it->second;
}

void VoxelAccumulator::add(const PointCloud& cloud) {
  for (const Point& p : cloud.points) add(p);
}

void VoxelAccumulator::evict_outside(const Vec3& center, double radius) {
  const double r2 = radius * radius;
  std::vector<Slot> kept;
  kept.reserve(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if ((centroid(i) - center).squaredNorm() <= r2) kept.push_back(slots_[i]);
  }
  if (kept.size() == slots_.size()) return;
  slots_ = std::move(kept);
  lookup_.clear();
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    lookup_.emplace(slots_[i].key, static_cast<std::uint32_t>(i));
  }
}

Vec3 VoxelAccumulator::centroid(std::size_t slot) const {
  const Slot& s = slots_[slot];
  return s.sum / static_cast<double>(s.count);
}

Point VoxelAccumulator::point(std::size_t slot) const {
  const Slot& s = slots_[slot];
  Point p;
  p.position = centroid(slot);
  if (s.colored > 0) {
    const auto avg = [&](std::uint64_t sum) {
      return static_cast<std::uint8_t>((sum + s.colored / 2) / s.colored);
    };
    p.color = Rgb{avg(s.r), avg(s.g), avg(s.b)};
  }
  p.label = s.dynamic ? Label::make_dynamic(s.instance) : Label::make_static();
  p.scan_index = s.first_index;
  return p;
}

PointCloud VoxelAccumulator::to_cloud() const {
  PointCloud cloud;
  cloud.points.reserve(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i) cloud.points.push_back(point(i));
  return cloud;
}

PointCloud voxel_downsample(const PointCloud& cloud, double leaf) {
  VoxelAccumulator acc(leaf);
  acc.add(cloud);
  PointCloud out = acc.to_cloud();
  out.frame_id = cloud.frame_id;
  out.timestamp = cloud.timestamp;
  return out;
}

}  // namespace dynslam
