#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dynslam {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Tangent-space element of SE(3). Stacked as [rotation; translation] when
/// flattened to a 6-vector.
struct Twist {
  Vec3 rotation = Vec3::Zero();     // axis * angle, radians
  Vec3 translation = Vec3::Zero();  // meters

  Vec6 vector() const;
  static Twist from_vector(const Vec6& v);
};

/// Rigid transform with a unit-quaternion rotation. Maps points from the
/// child frame into the parent frame: p_parent = R * p_child + t.
class Pose {
 public:
  Pose() = default;
  Pose(const Eigen::Quaterniond& rotation, const Vec3& translation);

  static Pose identity() { return Pose(); }
  static Pose from_matrix(const Eigen::Matrix4d& m);
  static Pose from_translation(const Vec3& t);
  static Pose from_axis_angle(const Vec3& axis, double angle, const Vec3& t = Vec3::Zero());

  const Eigen::Quaterniond& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat3 rotation_matrix() const { return rotation_.toRotationMatrix(); }
  Eigen::Matrix4d matrix() const;

  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;
  Vec3 operator*(const Vec3& p) const { return rotation_ * p + translation_; }

  /// Rotation angle in [0, pi].
  double rotation_angle() const;

 private:
  Eigen::Quaterniond rotation_ = Eigen::Quaterniond::Identity();
  Vec3 translation_ = Vec3::Zero();
};

Mat3 skew(const Vec3& v);
Mat3 so3_exp(const Vec3& omega);
Vec3 so3_log(const Eigen::Quaterniond& q);

Pose se3_exp(const Twist& t);
Twist se3_log(const Pose& pose);

/// Left-multiplicative update T <- exp(delta) * T.
inline Pose retract_left(const Pose& pose, const Twist& delta) { return se3_exp(delta) * pose; }

double translation_distance(const Pose& a, const Pose& b);
double rotation_distance(const Pose& a, const Pose& b);

bool is_finite(const Pose& pose);

}  // namespace dynslam
