#pragma once

#include <cstdint>
#include <vector>

#include "dynslam/core/point_cloud.hpp"

namespace dynslam {

struct SmoothnessResult {
  /// sigma_k = mean over neighbors i != k within the radius of (|p_k| - |p_i|),
  /// ranges taken in the sensor frame. Zero for ineligible points.
  std::vector<double> sigma;
  std::vector<std::uint32_t> neighbor_count;
  /// Point had at least min_neighbors neighbors.
  std::vector<std::uint8_t> eligible;
};

SmoothnessResult compute_smoothness(const PointCloud& cloud, double radius,
                                    std::size_t min_neighbors);

enum class FeatureKind : std::uint8_t { Edge, Planar };

struct FeaturePoint {
  Vec3 position = Vec3::Zero();  // sensor frame
  double smoothness = 0.0;
  FeatureKind kind = FeatureKind::Planar;
  std::uint32_t source_index = 0;  // index in the input cloud
};

struct FeatureSet {
  std::vector<FeaturePoint> edges;
  std::vector<FeaturePoint> planars;
  std::int64_t frame_id = 0;
  bool degenerate = false;  // input cloud was empty

  std::size_t size() const { return edges.size() + planars.size(); }
};

struct FeatureConfig {
  double smoothness_radius = 0.5;
  std::size_t min_neighbors = 5;
  double edge_threshold = 0.05;    // Edge if sigma > this
  double planar_threshold = 0.01;  // Planar if sigma < this
  int sectors = 6;
  std::size_t max_edges_per_sector = 20;
  std::size_t max_planars_per_sector = 60;
  /// Features of one kind closer than this inside a sector are suppressed.
  double min_feature_spacing = 0.2;

  void validate() const;
};

/// Per azimuth sector (splitting the cloud's observed azimuth span), the
/// highest-sigma eligible points above the edge threshold become edges and
/// the flattest (smallest |sigma|) eligible points below the planar threshold
/// become planars, up to the per-sector caps. Throws std::invalid_argument if
/// the cloud contains Dynamic points.
FeatureSet extract_features(const PointCloud& static_cloud, const FeatureConfig& config);

}  // namespace dynslam
