#include "dynslam/odometry/registration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "dynslam/odometry/residuals.hpp"

namespace dynslam {

void RegistrationConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("registration: max_iterations must be >= 1");
  if (!(outlier_gate > 0.0) || !(tight_outlier_gate > 0.0) || !(fine_outlier_gate > 0.0)) {
    throw std::invalid_argument("registration: outlier gates must be > 0");
  }
  if (!(max_neighbor_distance > 0.0)) {
    throw std::invalid_argument("registration: max_neighbor_distance must be > 0");
  }
  if (max_step_halvings < 0) throw std::invalid_argument("registration: max_step_halvings < 0");
}

namespace {

bool near_all(const KnnResult& nn, std::size_t k, double max_d2) {
  if (nn.neighbors.size() < k) return false;
  for (const auto& n : nn.neighbors) {
    if (n.sq_distance > max_d2) return false;
  }
  return true;
}

std::optional<ResidualGradient> evaluate(const Correspondence& c, const Vec3& p_hat) {
  return c.planar ? plane_residual_gradient(p_hat, c.a, c.b, c.c)
                  : edge_residual_gradient(p_hat, c.a, c.b);
}

}  // namespace

std::vector<Correspondence> associate(const FeatureSet& features, const LocalFeatureMap& map,
                                      const Pose& pose, double max_neighbor_distance,
                                      double gate) {
  std::vector<Correspondence> out;
  out.reserve(features.size());
  const double max_d2 = max_neighbor_distance * max_neighbor_distance;
  if (map.edge_count() >= 2) {
    for (const auto& f : features.edges) {
      const Vec3 p = pose * f.position;
      const KnnResult nn = map.edge_index().knn_search(p, 2);
      if (!near_all(nn, 2, max_d2)) continue;
      Correspondence c;
      c.source = f.position;
      c.a = map.edge_points()[nn.neighbors[0].id];
      c.b = map.edge_points()[nn.neighbors[1].id];
      const auto r = residual_edge(p, c.a, c.b);
      if (r && std::abs(*r) <= gate) out.push_back(c);
    }
  }
  if (map.planar_count() >= 3) {
    for (const auto& f : features.planars) {
      const Vec3 p = pose * f.position;
      const KnnResult nn = map.planar_index().knn_search(p, 3);
      if (!near_all(nn, 3, max_d2)) continue;
      Correspondence c;
      c.source = f.position;
      c.planar = true;
      c.a = map.planar_points()[nn.neighbors[0].id];
      c.b = map.planar_points()[nn.neighbors[1].id];
      c.c = map.planar_points()[nn.neighbors[2].id];
      const auto r = residual_plane(p, c.a, c.b, c.c);
      if (r && std::abs(*r) <= gate) out.push_back(c);
    }
  }
  return out;
}

double correspondence_cost(const std::vector<Correspondence>& corr, const Pose& pose) {
  double cost = 0.0;
  for (const auto& c : corr) {
    const auto r = evaluate(c, pose * c.source);
    if (r) cost += r->value * r->value;
  }
  return cost;
}

RegistrationResult estimate_pose(const FeatureSet& features, const LocalFeatureMap& map,
                                 const Pose& initial, const RegistrationConfig& config) {
  config.validate();
  if (map.edge_count() < config.min_map_edges || map.planar_count() < config.min_map_planars) {
    throw DegenerateRegistration("local map too sparse: " + std::to_string(map.edge_count()) +
                                     " edges, " + std::to_string(map.planar_count()) +
                                     " planars",
                                 initial);
  }

  RegistrationResult result;
  Pose pose = initial;
  const double gates[3] = {config.outlier_gate, config.tight_outlier_gate, config.fine_outlier_gate};
  int stage = 0;
  for (int it = 0; it < config.max_iterations; ++it) {
    if (it >= config.tighten_after) stage = std::max(stage, 1);
    if (it >= config.fine_after) stage = 2;
    const double gate = gates[stage];
    const auto corr = associate(features, map, pose, config.max_neighbor_distance, gate);
    if (corr.size() < config.min_correspondences) {
      throw DegenerateRegistration(
          "only " + std::to_string(corr.size()) + " correspondences at iteration " +
              std::to_string(it),
          initial);
    }

    Mat6 h = Mat6::Zero();
    Vec6 g = Vec6::Zero();
    double cost = 0.0;
    IterationTrace tr;
    for (const auto& c : corr) {
      const Vec3 p_hat = pose * c.source;
      const auto r = evaluate(c, p_hat);
      const RowVec6 j = twist_jacobian(r->gradient, p_hat);
      h.noalias() += j.transpose() * j;
      g.noalias() += j.transpose() * r->value;
      cost += r->value * r->value;
      ++(c.planar ? tr.planar_correspondences : tr.edge_correspondences);
    }
    tr.cost_before = cost;

    Vec6 delta = Vec6::Zero();
    if (!g.isZero(0.0)) {
      const Eigen::LDLT<Mat6> ldlt(h);
      if (ldlt.info() != Eigen::Success) throw SolverFailure("LDLT factorization failed");
      delta = ldlt.solve(-g);
      if (!delta.allFinite()) throw SolverFailure("non-finite Gauss-Newton step");
    }

    double scale = 1.0;
    Pose candidate = retract_left(pose, Twist::from_vector(delta));
    double new_cost = correspondence_cost(corr, candidate);
    while (new_cost > cost && tr.halvings < config.max_step_halvings) {
      scale *= 0.5;
      ++tr.halvings;
      candidate = retract_left(pose, Twist::from_vector(scale * delta));
      new_cost = correspondence_cost(corr, candidate);
    }
    const bool improved = new_cost <= cost;
    if (improved) pose = candidate;
    tr.cost_after = improved ? new_cost : cost;
    tr.step_norm = improved ? scale * delta.norm() : 0.0;
    tr.gate = gate;
    result.trace.push_back(tr);
    result.iterations = it + 1;
    result.final_cost = tr.cost_after;
    result.edge_inliers = tr.edge_correspondences;
    result.planar_inliers = tr.planar_correspondences;
    if (!improved || tr.step_norm < config.convergence_step) {
      if (stage == 2) {
        result.converged = true;
        break;
      }
      ++stage;
    }
  }
  if (!is_finite(pose)) throw SolverFailure("non-finite pose");
  result.pose = pose;
  return result;
}

}  // namespace dynslam
