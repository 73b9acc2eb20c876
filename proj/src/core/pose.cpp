#include "dynslam/core/pose.hpp"

#include <cmath>

namespace dynslam {

namespace {

constexpr double kTaylorAngle = 1e-8;
constexpr double kSeriesAngle = 1e-4;

}  // namespace

Vec6 Twist::vector() const {
  Vec6 v;
  v << rotation, translation;
  return v;
}

Twist Twist::from_vector(const Vec6& v) { return Twist{v.head<3>(), v.tail<3>()}; }

Pose::Pose(const Eigen::Quaterniond& rotation, const Vec3& translation)
    : rotation_(rotation.normalized()), translation_(translation) {}

Pose Pose::from_matrix(const Eigen::Matrix4d& m) {
  const Mat3 r = m.topLeftCorner<3, 3>();
  return Pose(Eigen::Quaterniond(r), m.topRightCorner<3, 1>());
}

Pose Pose::from_translation(const Vec3& t) { return Pose(Eigen::Quaterniond::Identity(), t); }

Pose Pose::from_axis_angle(const Vec3& axis, double angle, const Vec3& t) {
  return Pose(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())), t);
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Pose Pose::inverse() const {
  const Eigen::Quaterniond inv = rotation_.conjugate();
  return Pose(inv, -(inv * translation_));
}

Pose Pose::operator*(const Pose& rhs) const {
  return Pose(rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_);
}

double Pose::rotation_angle() const {
  return 2.0 * std::atan2(rotation_.vec().norm(), std::abs(rotation_.w()));
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Mat3 so3_exp(const Vec3& omega) {
  const double theta = omega.norm();
  if (theta < kTaylorAngle) {
    return Mat3::Identity() + skew(omega);
  }
  return Eigen::AngleAxisd(theta, omega / theta).toRotationMatrix();
}

Vec3 so3_log(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) {
    q.coeffs() = -q.coeffs();
  }
  const double n = q.vec().norm();
  if (n < kTaylorAngle) {
    return 2.0 * q.vec() / q.w();
  }
  const double theta = 2.0 * std::atan2(n, q.w());
  return (theta / n) * q.vec();
}

Pose se3_exp(const Twist& t) {
  const Vec3& omega = t.rotation;
  const double theta = omega.norm();
  const Mat3 w = skew(omega);

  Eigen::Quaterniond q;
  double b;  // (1 - cos) / theta^2
  double c;  // (theta - sin) / theta^3
  if (theta < kTaylorAngle) {
    q = Eigen::Quaterniond(1.0, 0.5 * omega.x(), 0.5 * omega.y(), 0.5 * omega.z());
    b = 0.5;
    c = 1.0 / 6.0;
  } else {
    const double half = 0.5 * theta;
    const double s = std::sin(half);
    q = Eigen::Quaterniond(std::cos(half), 0, 0, 0);
    q.vec() = (s / theta) * omega;
    b = 2.0 * s * s / (theta * theta);
    if (theta < kSeriesAngle) {
      const double t2 = theta * theta;
      c = 1.0 / 6.0 - t2 / 120.0;
    } else {
      c = (theta - std::sin(theta)) / (theta * theta * theta);
    }
  }
  const Mat3 v = Mat3::Identity() + b * w + c * w * w;
  return Pose(q, v * t.translation);
}

Twist se3_log(const Pose& pose) {
  const Vec3 omega = so3_log(pose.rotation());
  const double theta = omega.norm();
  const Mat3 w = skew(omega);
  double d;  // (1 - (theta/2) cot(theta/2)) / theta^2
  if (theta < kSeriesAngle) {
    d = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    const double half = 0.5 * theta;
    d = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
  }
  const Mat3 v_inv = Mat3::Identity() - 0.5 * w + d * w * w;
  return Twist{omega, v_inv * pose.translation()};
}

double translation_distance(const Pose& a, const Pose& b) {
  return (a.translation() - b.translation()).norm();
}

double rotation_distance(const Pose& a, const Pose& b) {
  return (a.inverse() * b).rotation_angle();
}

bool is_finite(const Pose& pose) {
  return pose.rotation().coeffs().allFinite() && pose.translation().allFinite();
}

}  // namespace dynslam
