#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dynslam/fusion/camera.hpp"

namespace dynslam::sim {

enum class Shape { Box, Cylinder };

/// Static obstacle. Boxes are axis-aligned; cylinders stand upright. `size`
/// is the bounding-box extent (a cylinder's diameter is size.x).
struct Obstacle {
  Shape shape = Shape::Box;
  Vec3 center = Vec3::Zero();  // center of the bounding box
  Vec3 size = Vec3::Ones();
  Rgb color{128, 128, 128};
};

/// Rigid object moving back and forth along a horizontal polyline at
/// constant speed.
struct MovingObject {
  std::string name;
  Shape shape = Shape::Cylinder;
  Vec3 size{0.5, 0.5, 1.4};
  double z_min = 0.4;  // height of the bottom face above the floor
  std::vector<Vec3> path;  // xy waypoints (z ignored)
  double speed = 1.0;      // m/s
  double start_offset = 0.0;  // meters travelled at t = 0
  std::string class_name = "person";
  Rgb color{200, 60, 40};

  /// Center of the bounding box at time t.
  Vec3 center_at(double t) const;
};

struct SensorConfig {
  std::size_t points_per_scan = 20000;
  double fov_horizontal_deg = 70.0;
  double fov_vertical_deg = 55.0;
  double range_noise = 0.005;  // meters, Gaussian stddev
  double max_range = 30.0;
};

struct SensorWaypoint {
  Vec3 position = Vec3::Zero();
  double yaw_deg = 0.0;
};

/// One waypoint means a stationary sensor; otherwise the sensor moves along
/// the polyline at `speed`, yaw interpolated linearly, and stops at the end.
struct TrajectoryConfig {
  std::vector<SensorWaypoint> waypoints;
  double speed = 0.5;
};

struct MaskDegradation {
  int erosion_radius = 0;     // pixels
  double truncation = 0.0;    // fraction of bbox rows dropped from one side
  double dropout = 0.0;       // per-frame probability of an empty segmentation
  double misclassification = 0.0;  // per-instance probability of a wrong class
  std::string misclassified_as = "chair";

  bool is_identity() const;
  void validate() const;
};

struct SceneConfig {
  Vec3 room_size{8.0, 6.0, 3.0};  // room spans [-x/2, x/2] x [-y/2, y/2] x [0, z]
  std::vector<Obstacle> obstacles;
  std::vector<MovingObject> moving_objects;
  SensorConfig sensor;
  CameraModel camera;
  TrajectoryConfig trajectory;
  double frame_rate = 10.0;
  std::size_t frames = 100;
  std::uint64_t seed = 1;
  MaskDegradation degradation;

  /// Throws std::invalid_argument on a degenerate configuration.
  void validate() const;
};

/// Camera matching the default sensor field of view, slightly wider.
CameraModel default_camera();

/// Office-like room with a few obstacles, stationary sensor and one person
/// walking across the view.
SceneConfig default_scene();

/// YAML scene file; missing keys take default_scene() values, unknown keys
/// are rejected.
SceneConfig load_scene_config(const std::filesystem::path& path);

/// Pose of the sensor (sensor -> world) at time t.
Pose sensor_pose_at(const TrajectoryConfig& trajectory, double t);

}  // namespace dynslam::sim
