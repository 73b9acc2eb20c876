#pragma once

#include <optional>
#include <vector>

#include "dynslam/sim/scene.hpp"

namespace dynslam::sim {

/// Where a surface came from. Room faces are 0..5 (x-, x+, y-, y+, floor,
/// ceiling), obstacles follow, then moving objects.
struct SurfaceInfo {
  Rgb color;
  int moving_index = -1;  // index into SceneConfig::moving_objects, or -1
};

struct RayHit {
  double distance = 0.0;
  int surface = -1;
};

/// The scene frozen at one instant.
class SceneSnapshot {
 public:
  SceneSnapshot(const SceneConfig& config, double t);

  std::optional<RayHit> cast(const Vec3& origin, const Vec3& unit_direction,
                             double max_range) const;
  const SurfaceInfo& surface(int id) const { return surfaces_[static_cast<std::size_t>(id)]; }
  std::size_t surface_count() const { return surfaces_.size(); }

  /// Signed-ish distance from p to the surface with the given id (0 on it).
  double distance_to_surface(int id, const Vec3& p) const;

 private:
  struct Solid {
    Shape shape;
    Vec3 min, max;  // bounding box
    int surface;
  };

  Vec3 room_min_, room_max_;
  std::vector<Solid> solids_;
  std::vector<SurfaceInfo> surfaces_;
};

}  // namespace dynslam::sim
