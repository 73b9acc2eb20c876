#pragma once

#include "dynslam/core/pose.hpp"

namespace dynslam {

struct KeyframePolicy {
  double translation = 0.3;  // meters
  double rotation = 0.17453292519943295;  // radians (10 degrees)

  void validate() const;
};

/// True when the motion since the last keyframe strictly exceeds either
/// threshold.
bool is_keyframe(const Pose& current, const Pose& last_keyframe, const KeyframePolicy& policy);

/// Constant-velocity guess: replays the previous inter-frame motion,
/// last * (previous^-1 * last).
Pose predict_constant_velocity(const Pose& previous, const Pose& last);

}  // namespace dynslam
