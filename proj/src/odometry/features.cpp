#include "dynslam/odometry/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dynslam/core/spatial_index.hpp"
#include "dynslam/simd/kernels.hpp"

namespace dynslam {

SmoothnessResult compute_smoothness(const PointCloud& cloud, double radius,
                                    std::size_t min_neighbors) {
  if (!(radius > 0.0)) throw std::invalid_argument("compute_smoothness: radius must be > 0");
  const std::size_t n = cloud.size();
  SmoothnessResult out;
  out.sigma.assign(n, 0.0);
  out.neighbor_count.assign(n, 0);
  out.eligible.assign(n, 0);
  if (n == 0) return out;

  const std::vector<Vec3> pts = positions_of(cloud);
  const SpatialIndex index(pts, radius);
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = pts[i].norm();
  std::vector<double> norms_in_storage(n);
  const auto& order = index.storage_order();
  for (std::size_t s = 0; s < n; ++s) norms_in_storage[s] = norms[order[s]];

  const double r2 = radius * radius;
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& c = pts[i];
    simd::RangeStats total;
    index.for_each_block(c, radius, [&](const SpatialIndex::Block& b) {
      const simd::RangeStats s = k.range_stats(b.xs, b.ys, b.zs, norms_in_storage.data() + b.offset,
                                               b.size, c.x(), c.y(), c.z(), r2);
      total.count += s.count;
      total.norm_sum += s.norm_sum;
    });
    // The query point is always inside its own ball; drop it.
    const std::size_t count = total.count - 1;
    const double neighbor_sum = total.norm_sum - norms[i];
    out.neighbor_count[i] = static_cast<std::uint32_t>(count);
    if (count >= std::max<std::size_t>(min_neighbors, 1)) {
      out.eligible[i] = 1;
      out.sigma[i] = norms[i] - neighbor_sum / static_cast<double>(count);
    }
  }
  return out;
}

void FeatureConfig::validate() const {
  if (!(smoothness_radius > 0.0)) throw std::invalid_argument("features: radius must be > 0");
  if (sectors < 1) throw std::invalid_argument("features: sectors must be >= 1");
  if (planar_threshold > edge_threshold) {
    throw std::invalid_argument("features: planar threshold must not exceed edge threshold");
  }
  if (min_feature_spacing < 0.0) throw std::invalid_argument("features: spacing must be >= 0");
}

namespace {

void pick(const std::vector<std::uint32_t>& ranked, const std::vector<Vec3>& pts,
          std::size_t cap, double spacing, std::vector<std::uint32_t>& chosen) {
  const double s2 = spacing * spacing;
  const std::size_t start = chosen.size();
  for (const std::uint32_t id : ranked) {
    if (chosen.size() - start >= cap) break;
    const bool crowded =
        spacing > 0.0 && std::any_of(chosen.begin() + static_cast<std::ptrdiff_t>(start),
                                     chosen.end(), [&](std::uint32_t other) {
                                       return (pts[other] - pts[id]).squaredNorm() < s2;
                                     });
    if (!crowded) chosen.push_back(id);
  }
}

}  // namespace

FeatureSet extract_features(const PointCloud& static_cloud, const FeatureConfig& config) {
  config.validate();
  FeatureSet features;
  features.frame_id = static_cloud.frame_id;
  if (static_cloud.empty()) {
    features.degenerate = true;
    return features;
  }
  for (const Point& p : static_cloud.points) {
    if (p.label.is_dynamic()) {
      throw std::invalid_argument("extract_features: input contains dynamic points");
    }
  }

  const std::vector<Vec3> pts = positions_of(static_cloud);
  const SmoothnessResult sm =
      compute_smoothness(static_cloud, config.smoothness_radius, config.min_neighbors);

  const std::size_t n = pts.size();
  std::vector<double> azimuth(n);
  double az_lo = std::numeric_limits<double>::infinity();
  double az_hi = -az_lo;
  for (std::size_t i = 0; i < n; ++i) {
    azimuth[i] = std::atan2(pts[i].y(), pts[i].x());
    az_lo = std::min(az_lo, azimuth[i]);
    az_hi = std::max(az_hi, azimuth[i]);
  }
  const double span = std::max(az_hi - az_lo, 1e-12);
  const auto sector_of = [&](std::size_t i) {
    const int s = static_cast<int>((azimuth[i] - az_lo) / span * config.sectors);
    return std::clamp(s, 0, config.sectors - 1);
  };

  std::vector<std::vector<std::uint32_t>> edge_cand(config.sectors), plane_cand(config.sectors);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!sm.eligible[i]) continue;
    if (sm.sigma[i] > config.edge_threshold) {
      edge_cand[sector_of(i)].push_back(i);
    } else if (sm.sigma[i] < config.planar_threshold) {
      plane_cand[sector_of(i)].push_back(i);
    }
  }

  std::vector<std::uint32_t> edges, planars;
  for (int s = 0; s < config.sectors; ++s) {
    auto& ec = edge_cand[s];
    std::stable_sort(ec.begin(), ec.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return sm.sigma[a] > sm.sigma[b]; });
    pick(ec, pts, config.max_edges_per_sector, config.min_feature_spacing, edges);

    auto& pc = plane_cand[s];
    std::stable_sort(pc.begin(), pc.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::abs(sm.sigma[a]) < std::abs(sm.sigma[b]);
    });
    pick(pc, pts, config.max_planars_per_sector, config.min_feature_spacing, planars);
  }

  const auto make = [&](std::uint32_t i, FeatureKind kind) {
    return FeaturePoint{pts[i], sm.sigma[i], kind, i};
  };
  for (const auto i : edges) features.edges.push_back(make(i, FeatureKind::Edge));
  for (const auto i : planars) features.planars.push_back(make(i, FeatureKind::Planar));
  return features;
}

}  // namespace dynslam
