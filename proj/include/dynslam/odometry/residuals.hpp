#pragma once

#include <optional>

#include <Eigen/Core>

#include "dynslam/core/pose.hpp"

namespace dynslam {

/// Neighbor pairs/triples closer together than this carry no direction.
inline constexpr double kDegenerateGeometry = 1e-6;

/// Distance from p to the line through p1 and p2, |(p-p1) x (p-p2)| / |p1-p2|.
/// nullopt when |p1 - p2| <= kDegenerateGeometry.
std::optional<double> residual_edge(const Vec3& p, const Vec3& p1, const Vec3& p2);

/// Signed distance from p to the plane through p1, p2, p3 with normal
/// (p1-p2) x (p1-p3). nullopt when the normal is shorter than
/// kDegenerateGeometry (collinear triple).
std::optional<double> residual_plane(const Vec3& p, const Vec3& p1, const Vec3& p2,
                                     const Vec3& p3);

struct ResidualGradient {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();  // d value / d p
};

/// Value and gradient w.r.t. p. On the line itself the gradient is zero.
std::optional<ResidualGradient> edge_residual_gradient(const Vec3& p, const Vec3& p1,
                                                       const Vec3& p2);
std::optional<ResidualGradient> plane_residual_gradient(const Vec3& p, const Vec3& p1,
                                                        const Vec3& p2, const Vec3& p3);

using RowVec6 = Eigen::Matrix<double, 1, 6>;

/// d f(exp(delta) * T * x) / d delta at delta = 0, with p_hat = T * x and
/// gradient = df/dp at p_hat. Layout matches Twist::vector().
RowVec6 twist_jacobian(const Vec3& gradient, const Vec3& p_hat);

}  // namespace dynslam
