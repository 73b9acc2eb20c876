#include "dynslam/odometry/residuals.hpp"

namespace dynslam {

std::optional<double> residual_edge(const Vec3& p, const Vec3& p1, const Vec3& p2) {
  const double len = (p1 - p2).norm();
  if (!(len > kDegenerateGeometry)) return std::nullopt;
  return (p - p1).cross(p - p2).norm() / len;
}

std::optional<double> residual_plane(const Vec3& p, const Vec3& p1, const Vec3& p2,
                                     const Vec3& p3) {
  const Vec3 n = (p1 - p2).cross(p1 - p3);
  const double len = n.norm();
  if (!(len > kDegenerateGeometry)) return std::nullopt;
  return (p - p1).dot(n) / len;
}

std::optional<ResidualGradient> edge_residual_gradient(const Vec3& p, const Vec3& p1,
                                                       const Vec3& p2) {
  const Vec3 d = p1 - p2;
  const double len = d.norm();
  if (!(len > kDegenerateGeometry)) return std::nullopt;
  const Vec3 c = (p - p1).cross(p - p2);
  const double cn = c.norm();
  ResidualGradient out;
  out.value = cn / len;
  // dc/dp = [p2 - p1]x, so grad = [p2 - p1]x^T c / (|c| len) = (p1 - p2) x c / (|c| len).
  if (cn > 0.0) out.gradient = d.cross(c) / (cn * len);
  return out;
}

std::optional<ResidualGradient> plane_residual_gradient(const Vec3& p, const Vec3& p1,
                                                        const Vec3& p2, const Vec3& p3) {
  const Vec3 n = (p1 - p2).cross(p1 - p3);
  const double len = n.norm();
  if (!(len > kDegenerateGeometry)) return std::nullopt;
  const Vec3 unit = n / len;
  return ResidualGradient{(p - p1).dot(unit), unit};
}

RowVec6 twist_jacobian(const Vec3& gradient, const Vec3& p_hat) {
  // dp/d(rotation) = -[p]x, dp/d(translation) = I.
  RowVec6 j;
  j.head<3>() = p_hat.cross(gradient).transpose();
  j.tail<3>() = gradient.transpose();
  return j;
}

}  // namespace dynslam
