#include "dynslam/odometry/keyframe.hpp"

#include <stdexcept>

namespace dynslam {

void KeyframePolicy::validate() const {
  if (!(translation >= 0.0) || !(rotation >= 0.0)) {
    throw std::invalid_argument("keyframe thresholds must be >= 0");
  }
}

bool is_keyframe(const Pose& current, const Pose& last_keyframe, const KeyframePolicy& policy) {
  if (translation_distance(current, last_keyframe) > policy.translation) return true;
  // Quaternion round-off puts a few ulps of angle on identical rotations.
  return rotation_distance(current, last_keyframe) > policy.rotation + 1e-12;
}

Pose predict_constant_velocity(const Pose& previous, const Pose& last) {
  return last * (previous.inverse() * last);
}

}  // namespace dynslam
