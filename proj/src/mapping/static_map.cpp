#include "dynslam/mapping/static_map.hpp"

#include <algorithm>
#include <stdexcept>

namespace dynslam {

GlobalStaticMap::GlobalStaticMap(double leaf) : voxels_(leaf) {}

void GlobalStaticMap::update(const PointCloud& static_points, const Pose& pose, bool is_keyframe,
                             const ColorImage* image, const CameraModel* camera,
                             std::span<const std::uint8_t> tainted) {
  if (!is_finite(pose)) throw std::invalid_argument("static map: non-finite pose");
  if (!is_keyframe) return;
  if (!tainted.empty() && tainted.size() != static_points.size()) {
    throw std::invalid_argument("static map: taint flags do not match the cloud");
  }
  const PointCloud colored =
      image && camera ? colorize(static_points, *image, *camera) : static_points;
  for (std::size_t i = 0; i < colored.size(); ++i) {
    if (colored[i].label.is_dynamic()) continue;
    Point p = colored[i];
    p.position = pose * p.position;
    const std::size_t slot = voxels_.add(p);
    if (slot >= taint_.size()) taint_.resize(slot + 1, 0);
    if (!tainted.empty() && tainted[i]) ++taint_[slot];
  }
  ++keyframes_;
}

std::size_t GlobalStaticMap::tainted_count() const {
  return static_cast<std::size_t>(
      std::count_if(taint_.begin(), taint_.end(), [](std::uint32_t t) { return t > 0; }));
}

GlobalStaticMap update_static_map(GlobalStaticMap map, const PointCloud& static_points,
                                  const Pose& pose, bool is_keyframe) {
  map.update(static_points, pose, is_keyframe);
  return map;
}

}  // namespace dynslam
