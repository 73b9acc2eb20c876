#pragma once

#include <stdexcept>
#include <vector>

#include "dynslam/odometry/features.hpp"
#include "dynslam/odometry/local_map.hpp"

namespace dynslam {

struct RegistrationConfig {
  int max_iterations = 20;
  double convergence_step = 1e-6;   // stop once |delta| drops below this
  double outlier_gate = 1.0;        // |residual| above this is discarded
  double tight_outlier_gate = 0.5;  // replaces outlier_gate from tighten_after on
  int tighten_after = 3;
  /// Last gate stage; convergence only counts once it is active. Reached at
  /// fine_after or as soon as a looser stage stops moving.
  double fine_outlier_gate = 0.1;
  int fine_after = 6;
  double max_neighbor_distance = 1.0;
  std::size_t min_map_edges = 10;
  std::size_t min_map_planars = 30;
  std::size_t min_correspondences = 12;
  int max_step_halvings = 8;

  void validate() const;
};

struct IterationTrace {
  double cost_before = 0.0;  // sum of squared residuals at the start of the iteration
  double cost_after = 0.0;   // same correspondences, after the accepted step
  double step_norm = 0.0;
  double gate = 0.0;
  int halvings = 0;
  std::size_t edge_correspondences = 0;
  std::size_t planar_correspondences = 0;
};

struct RegistrationResult {
  Pose pose;
  int iterations = 0;
  bool converged = false;
  double final_cost = 0.0;
  std::size_t edge_inliers = 0;
  std::size_t planar_inliers = 0;
  std::vector<IterationTrace> trace;
};

/// Too few map features or correspondences to constrain the pose.
class DegenerateRegistration : public std::runtime_error {
 public:
  DegenerateRegistration(const std::string& what, const Pose& initial)
      : std::runtime_error(what), initial_(initial) {}
  const Pose& initial() const { return initial_; }

 private:
  Pose initial_;
};

/// Normal equations could not be solved or produced a non-finite step.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One point-to-feature correspondence at the current estimate.
struct Correspondence {
  Vec3 source = Vec3::Zero();  // sensor frame
  Vec3 a, b, c;                // map points (c unused for edges)
  bool planar = false;
};

/// Nearest-neighbor association of every feature at pose T. Edge features
/// pair with their 2 nearest map edges, planar features with their 3 nearest
/// map planars; neighbors beyond max_neighbor_distance, degenerate
/// configurations and residuals above `gate` are skipped.
std::vector<Correspondence> associate(const FeatureSet& features, const LocalFeatureMap& map,
                                      const Pose& pose, double max_neighbor_distance,
                                      double gate);

/// Sum of squared residuals of the correspondences evaluated at pose.
double correspondence_cost(const std::vector<Correspondence>& corr, const Pose& pose);

/// Gauss-Newton over the left-perturbation twist, re-associating each
/// iteration. A step that raises the cost is halved until it does not. The
/// outlier gate narrows in stages (outlier_gate, tight_outlier_gate,
/// fine_outlier_gate).
RegistrationResult estimate_pose(const FeatureSet& features, const LocalFeatureMap& map,
                                 const Pose& initial, const RegistrationConfig& config);

}  // namespace dynslam
