#pragma once

#include <cstdint>
#include <vector>

#include "dynslam/core/point_cloud.hpp"
#include "dynslam/fusion/camera.hpp"

namespace dynslam {

struct Cluster {
  std::vector<std::uint32_t> point_ids;  // ascending
  double dynamic_fraction = 0.0;         // initially-dynamic members / members
  Vec3 centroid = Vec3::Zero();
  bool dynamic = false;                  // verdict, set by fuse_labels

  std::size_t size() const { return point_ids.size(); }
};

/// Connected components of the graph linking points at distance <=
/// tolerance. Components outside [min_size, max_size] are dropped. Sorted by
/// descending size, ties by smallest member id. dynamic_fraction is computed
/// from the cloud's current labels.
std::vector<Cluster> euclidean_cluster(const PointCloud& cloud, double tolerance,
                                       std::size_t min_size, std::size_t max_size);

struct FusionOutput {
  PointCloud dynamic_points;  // P_D, full resolution
  PointCloud static_points;   // P_S, full resolution
  /// Final label per input point, in input order.
  std::vector<Label> labels;
  /// Index into `clusters` of the Dynamic cluster that claimed each input
  /// point, or -1.
  std::vector<std::int32_t> owner;
  std::vector<Cluster> clusters;
  /// The cloud the cluster ids refer to (the downsampled cloud when fusion
  /// runs on a downsampled copy).
  PointCloud clustered_cloud;
};

/// Cluster verdict (dynamic iff dynamic_fraction >= dynamic_threshold), then
/// per point: Dynamic iff it is a member of a Dynamic cluster or lies within
/// relabel_radius of one; Static otherwise. This covers static points pulled
/// in by nearby dynamic clusters and isolated dynamic points released back to
/// static.
FusionOutput fuse_labels(const PointCloud& cloud, std::vector<Cluster> clusters,
                         double relabel_radius, double dynamic_threshold);

struct FusionParams {
  double cluster_leaf = 0.1;
  double cluster_tolerance = 0.3;
  std::size_t min_cluster_size = 20;
  std::size_t max_cluster_size = 50000;
  double relabel_radius = 0.3;
  double dynamic_threshold = 0.9;

  void validate() const;
};

/// Full multi-modal labeling of one frame: downsample, project the mask onto
/// the downsampled points, cluster, fuse, then hand each full-resolution point
/// the label of its nearest downsampled point.
FusionOutput fuse_frame(const PointCloud& cloud, const DynamicMaskImage& mask,
                        const CameraModel& camera, const FusionParams& params);

/// Splits an already-labeled cloud without clustering (mask verdict final).
FusionOutput split_by_labels(const PointCloud& labeled);

}  // namespace dynslam
