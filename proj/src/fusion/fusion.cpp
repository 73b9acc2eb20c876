#include "dynslam/fusion/fusion.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "dynslam/core/spatial_index.hpp"
#include "dynslam/core/voxel_grid.hpp"
#include "dynslam/simd/kernels.hpp"

namespace dynslam {

std::vector<Cluster> euclidean_cluster(const PointCloud& cloud, double tolerance,
                                       std::size_t min_size, std::size_t max_size) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("euclidean_cluster: tolerance must be > 0");
  if (min_size < 1 || min_size > max_size) {
    throw std::invalid_argument("euclidean_cluster: need 1 <= min_size <= max_size");
  }
  const std::size_t n = cloud.size();
  std::vector<Cluster> clusters;
  if (n == 0) return clusters;

  const std::vector<Vec3> pts = positions_of(cloud);
  const SpatialIndex index(pts, tolerance);
  const double tol2 = tolerance * tolerance;
  const auto& k = simd::kernels();

  std::vector<std::uint8_t> visited(n, 0);
  std::vector<std::uint32_t> frontier;
  std::vector<double> d2;
  for (std::uint32_t seed = 0; seed < n; ++seed) {
    if (visited[seed]) continue;
    visited[seed] = 1;
    std::vector<std::uint32_t> members{seed};
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const std::uint32_t cur = frontier.back();
      frontier.pop_back();
      const Vec3& c = pts[cur];
      index.for_each_block(c, tolerance, [&](const SpatialIndex::Block& b) {
        d2.resize(b.size);
        k.squared_distances(b.xs, b.ys, b.zs, b.size, c.x(), c.y(), c.z(), d2.data());
        for (std::size_t i = 0; i < b.size; ++i) {
          const std::uint32_t id = b.ids[i];
          if (d2[i] <= tol2 && !visited[id]) {
            visited[id] = 1;
            members.push_back(id);
            frontier.push_back(id);
          }
        }
      });
    }
    if (members.size() < min_size || members.size() > max_size) continue;

    std::sort(members.begin(), members.end());
    Cluster cl;
    std::size_t dynamic = 0;
    for (const std::uint32_t id : members) {
      cl.centroid += pts[id];
      if (cloud[id].label.is_dynamic()) ++dynamic;
    }
    cl.centroid /= static_cast<double>(members.size());
    cl.dynamic_fraction = static_cast<double>(dynamic) / static_cast<double>(members.size());
    cl.point_ids = std::move(members);
    clusters.push_back(std::move(cl));
  }

  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.point_ids.front() < b.point_ids.front();
  });
  return clusters;
}

namespace {

// Nearest point (ties to the smaller id) within radius, inclusive.
std::optional<std::uint32_t> nearest_within(const SpatialIndex& index, const Vec3& c,
                                            double radius) {
  const auto& k = simd::kernels();
  thread_local std::vector<double> d2;
  double best = radius * radius;
  std::optional<std::uint32_t> best_id;
  index.for_each_block(c, radius, [&](const SpatialIndex::Block& b) {
    d2.resize(b.size);
    k.squared_distances(b.xs, b.ys, b.zs, b.size, c.x(), c.y(), c.z(), d2.data());
    for (std::size_t i = 0; i < b.size; ++i) {
      if (d2[i] < best || (d2[i] == best && (!best_id || b.ids[i] < *best_id))) {
        best = d2[i];
        best_id = b.ids[i];
      }
    }
  });
  return best_id;
}

void split_into(FusionOutput& out, const PointCloud& cloud) {
  out.dynamic_points = cloud.empty_like();
  out.static_points = cloud.empty_like();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Point p = cloud[i];
    p.label = out.labels[i];
    (p.label.is_dynamic() ? out.dynamic_points : out.static_points).points.push_back(p);
  }
}

}  // namespace

FusionOutput fuse_labels(const PointCloud& cloud, std::vector<Cluster> clusters,
                         double relabel_radius, double dynamic_threshold) {
  if (!(dynamic_threshold > 0.0 && dynamic_threshold <= 1.0)) {
    throw std::invalid_argument("fuse_labels: dynamic_threshold must be in (0, 1]");
  }
  if (!(relabel_radius >= 0.0)) {
    throw std::invalid_argument("fuse_labels: relabel_radius must be >= 0");
  }
  FusionOutput out;
  const std::size_t n = cloud.size();
  out.labels.assign(n, Label::make_static());
  out.owner.assign(n, -1);

  std::vector<Vec3> dyn_pts;
  std::vector<std::int32_t> dyn_owner;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    Cluster& cl = clusters[c];
    cl.dynamic = cl.dynamic_fraction >= dynamic_threshold;
    if (!cl.dynamic) continue;
    for (const std::uint32_t id : cl.point_ids) {
      if (id >= n) throw std::invalid_argument("fuse_labels: cluster id out of range");
      out.owner[id] = static_cast<std::int32_t>(c);
      dyn_pts.push_back(cloud[id].position);
      dyn_owner.push_back(static_cast<std::int32_t>(c));
    }
  }

  if (!dyn_pts.empty() && relabel_radius > 0.0) {
    const SpatialIndex index(dyn_pts, relabel_radius);
    for (std::size_t i = 0; i < n; ++i) {
      if (out.owner[i] >= 0) continue;
      const auto nn = nearest_within(index, cloud[i].position, relabel_radius);
      if (nn) out.owner[i] = dyn_owner[*nn];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (out.owner[i] >= 0) {
      out.labels[i] = Label::make_dynamic(static_cast<std::uint16_t>(out.owner[i] + 1));
    }
  }
  split_into(out, cloud);
  out.clusters = std::move(clusters);
  out.clustered_cloud = cloud;
  return out;
}

void FusionParams::validate() const {
  if (!(cluster_leaf > 0.0)) throw std::invalid_argument("fusion: cluster_leaf must be > 0");
  if (!(cluster_tolerance > 0.0)) {
    throw std::invalid_argument("fusion: cluster_tolerance must be > 0");
  }
  if (min_cluster_size < 1 || min_cluster_size > max_cluster_size) {
    throw std::invalid_argument("fusion: need 1 <= min_cluster_size <= max_cluster_size");
  }
  if (!(relabel_radius >= 0.0)) throw std::invalid_argument("fusion: relabel_radius must be >= 0");
  if (!(dynamic_threshold > 0.0 && dynamic_threshold <= 1.0)) {
    throw std::invalid_argument("fusion: dynamic_threshold must be in (0, 1]");
  }
}

FusionOutput fuse_frame(const PointCloud& cloud, const DynamicMaskImage& mask,
                        const CameraModel& camera, const FusionParams& params) {
  params.validate();
  VoxelAccumulator voxels(params.cluster_leaf);
  std::vector<std::uint32_t> slot(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    slot[i] = static_cast<std::uint32_t>(voxels.add(cloud[i]));
  }
  PointCloud grid = voxels.to_cloud();
  grid.frame_id = cloud.frame_id;
  grid.timestamp = cloud.timestamp;
  PointCloud down = label_points(grid, mask, camera);
  auto clusters = euclidean_cluster(down, params.cluster_tolerance, params.min_cluster_size,
                                    params.max_cluster_size);
  FusionOutput coarse =
      fuse_labels(down, std::move(clusters), params.relabel_radius, params.dynamic_threshold);

  FusionOutput out;
  out.labels.assign(cloud.size(), Label::make_static());
  out.owner.assign(cloud.size(), -1);
  const bool any_dynamic = std::any_of(coarse.labels.begin(), coarse.labels.end(),
                                       [](const Label& l) { return l.is_dynamic(); });
  if (any_dynamic) {
    const std::vector<Vec3> down_pts = positions_of(down);
    const SpatialIndex index(down_pts, params.cluster_leaf);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      // The point's own voxel centroid bounds the nearest-centroid distance.
      const Vec3& p = cloud[i].position;
      const double own = (p - down_pts[slot[i]]).norm();
      const std::uint32_t d = nearest_within(index, p, own * (1.0 + 1e-12) + 1e-12).value();
      out.labels[i] = coarse.labels[d];
      out.owner[i] = coarse.owner[d];
    }
  }
  split_into(out, cloud);
  out.clusters = std::move(coarse.clusters);
  out.clustered_cloud = std::move(coarse.clustered_cloud);
  return out;
}

FusionOutput split_by_labels(const PointCloud& labeled) {
  FusionOutput out;
  out.labels.reserve(labeled.size());
  for (const Point& p : labeled.points) {
    out.labels.push_back(p.label.is_dynamic() ? p.label : Label::make_static());
  }
  out.owner.assign(labeled.size(), -1);
  split_into(out, labeled);
  out.clustered_cloud = labeled.empty_like();
  return out;
}

}  // namespace dynslam
