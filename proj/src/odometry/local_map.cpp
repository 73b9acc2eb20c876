#include "dynslam/odometry/local_map.hpp"

#include <stdexcept>

namespace dynslam {

LocalFeatureMap::LocalFeatureMap(const LocalMapConfig& config)
    : config_(config), edges_(config.leaf), planars_(config.leaf) {
  if (!(config.window_radius > 0.0)) {
    throw std::invalid_argument("local map: window_radius must be > 0");
  }
}

void LocalFeatureMap::update(const FeatureSet& features, const Pose& pose) {
  std::vector<Vec3> e, p;
  e.reserve(features.edges.size());
  p.reserve(features.planars.size());
  for (const auto& f : features.edges) e.push_back(pose * f.position);
  for (const auto& f : features.planars) p.push_back(pose * f.position);
  insert(e, p, pose.translation());
}

void LocalFeatureMap::insert(const std::vector<Vec3>& edges, const std::vector<Vec3>& planars,
                             const Vec3& sensor_position) {
  Point pt;
  pt.label = Label::make_static();
  for (const Vec3& v : edges) {
    pt.position = v;
    edges_.add(pt);
  }
  for (const Vec3& v : planars) {
    pt.position = v;
    planars_.add(pt);
  }
  rebuild(sensor_position);
}

void LocalFeatureMap::rebuild(const Vec3& sensor_position) {
  edges_.evict_outside(sensor_position, config_.window_radius);
  planars_.evict_outside(sensor_position, config_.window_radius);
  edge_points_.resize(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) edge_points_[i] = edges_.centroid(i);
  planar_points_.resize(planars_.size());
  for (std::size_t i = 0; i < planars_.size(); ++i) planar_points_[i] = planars_.centroid(i);
  // Cells around the association search radius keep queries cheap.
  edge_index_ = SpatialIndex(edge_points_, 1.0);
  planar_index_ = SpatialIndex(planar_points_, 1.0);
}

LocalFeatureMap update_local_map(LocalFeatureMap map, const FeatureSet& features,
                                 const Pose& pose) {
  map.update(features, pose);
  return map;
}

}  // namespace dynslam
