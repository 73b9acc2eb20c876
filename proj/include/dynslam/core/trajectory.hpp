#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "dynslam/core/pose.hpp"

namespace dynslam {

struct TimedPose {
  double timestamp = 0.0;
  Pose pose;
};

using Trajectory = std::vector<TimedPose>;

class TrajectoryIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// TUM format: "timestamp tx ty tz qx qy qz qw" per line, '#' comments.
Trajectory read_tum(const std::filesystem::path& path);
void write_tum(const std::filesystem::path& path, const Trajectory& trajectory);

}  // namespace dynslam
