#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "dynslam/core/point_cloud.hpp"
#include "dynslam/mask/binary_image.hpp"
#include "dynslam/simd/kernels.hpp"

namespace dynslam {

/// Pinhole camera rigidly attached to the range sensor. `extrinsic` maps
/// sensor-frame points into the camera frame (z forward, x right, y down).
struct CameraModel {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
  Pose extrinsic;

  /// Throws std::invalid_argument unless fx, fy > 0 and the principal point
  /// lies inside the image.
  void validate() const;

  simd::ProjectionParams projection_params() const;
};

/// Extrinsic for a camera looking along the sensor's +x axis (sensor frame:
/// x forward, y left, z up).
Pose forward_looking_extrinsic(const Vec3& camera_in_sensor = Vec3::Zero());

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;

  int px() const;
  int py() const;
};

/// Nullopt when the point is behind the camera or lands outside the image.
std::optional<Projection> project_point(const CameraModel& camera, const Vec3& p);

/// Linear pixel index per point (-1 when out of view), via the SIMD kernel.
std::vector<std::int32_t> project_cloud(const CameraModel& camera, const PointCloud& cloud);

/// Initial labels: Dynamic for in-view points whose pixel is set in the
/// mask, Static otherwise. Throws std::invalid_argument when the mask size
/// differs from the camera resolution.
PointCloud label_points(const PointCloud& cloud, const DynamicMaskImage& mask,
                        const CameraModel& camera);

struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Samples each in-view point's color from the image; out-of-view points
/// lose their color.
PointCloud colorize(const PointCloud& cloud, const ColorImage& image, const CameraModel& camera);

// Calibration file: JSON {fx, fy, cx, cy, width, height,
//                          extrinsic: 16 row-major floats (4x4)}.
CameraModel load_calibration(const std::filesystem::path& path);
void save_calibration(const std::filesystem::path& path, const CameraModel& camera);

}  // namespace dynslam
