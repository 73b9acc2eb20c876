#pragma once

// Shared fixtures for the unit and acceptance tests: seeded generators and
// brute-force reference implementations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <vector>

#include "dynslam/core/point_cloud.hpp"
#include "dynslam/core/pose.hpp"
#include "dynslam/mask/binary_image.hpp"
#include "dynslam/odometry/features.hpp"
#include "dynslam/odometry/local_map.hpp"
#include "dynslam/sim/scene.hpp"
#include "dynslam/sim/simulator.hpp"

namespace dynslam::test {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(std::mt19937_64& rng, double lo, double hi) {
  return Vec3(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi));
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

inline Pose random_pose(std::mt19937_64& rng, double max_t, double max_angle) {
  return Pose::from_axis_angle(random_unit(rng), uniform(rng, 0.0, max_angle),
                               random_unit(rng) * uniform(rng, 0.0, max_t));
}

inline std::vector<Vec3> random_points(std::mt19937_64& rng, std::size_t n, double extent) {
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = random_vec(rng, -extent, extent);
  return pts;
}

inline BinaryImage random_mask(std::mt19937_64& rng, int w, int h, double density) {
  BinaryImage m(w, h);
  std::bernoulli_distribution b(density);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.set(x, y, b(rng));
  }
  return m;
}

/// Per-pixel maximum over the (2r+1)^2 window, clipped to the image.
inline BinaryImage dilate_reference(const BinaryImage& m, int r) {
  BinaryImage out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool any = false;
      for (int dy = -r; dy <= r && !any; ++dy) {
        for (int dx = -r; dx <= r && !any; ++dx) {
          any = m.contains(x + dx, y + dy) && m.at(x + dx, y + dy);
        }
      }
      out.set(x, y, any);
    }
  }
  return out;
}

/// Union-find over the <= tolerance graph; returns components as sorted id
/// lists, sorted by their smallest id.
inline std::vector<std::vector<std::uint32_t>> components_reference(const std::vector<Vec3>& pts,
                                                                    double tolerance) {
  std::vector<std::uint32_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0u);
  const auto find = [&](std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if ((pts[i] - pts[j]).norm() <= tolerance) {
        parent[find(static_cast<std::uint32_t>(i))] = find(static_cast<std::uint32_t>(j));
      }
    }
  }
  std::vector<std::vector<std::uint32_t>> groups(pts.size());
  for (std::uint32_t i = 0; i < pts.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& g : groups) {
    if (!g.empty()) out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Mean of (|p_k| - |p_i|) over the other points within radius, by direct
/// summation.
struct SmoothnessRef {
  double sigma = 0.0;
  std::size_t neighbors = 0;
};

inline SmoothnessRef smoothness_reference(const std::vector<Vec3>& pts, std::size_t k,
                                          double radius) {
  SmoothnessRef out;
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == k || (pts[i] - pts[k]).norm() > radius) continue;
    sum += pts[k].norm() - pts[i].norm();
    ++out.neighbors;
  }
  if (out.neighbors > 0) out.sigma = sum / static_cast<double>(out.neighbors);
  return out;
}

/// Distance from p to the line through a and b via the foot of the
/// orthogonal projection.
inline double line_distance_reference(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double t = (p - a).dot(d) / d.dot(d);
  return (p - (a + t * d)).norm();
}

/// Signed distance in Hesse normal form n.x = d, normal along (b-a) x (c-a).
inline double plane_distance_reference(const Vec3& p, const Vec3& a, const Vec3& b,
                                       const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a).normalized();
  const double d = n.dot(a);
  return n.dot(p) - d;
}

inline double relative_error(double got, double want, double floor) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

/// The walking-person room used by the ablation runs, with the mask
/// degradation of configs/scene_walker.yaml.
inline sim::SceneConfig walker_scene(std::uint64_t seed) {
  sim::SceneConfig s = sim::default_scene();
  s.seed = seed;
  s.degradation.erosion_radius = 3;
  s.degradation.truncation = 0.2;
  s.degradation.dropout = 0.05;
  return s;
}

/// Room with its obstacles but nothing moving and no range noise.
inline sim::SceneConfig still_room() {
  sim::SceneConfig s = sim::default_scene();
  s.moving_objects.clear();
  s.sensor.range_noise = 0.0;
  s.frames = 3;
  s.degradation = {};
  return s;
}

/// One noiseless scan of the still room: a dense map holding every edge and
/// planar candidate, and the regular capped feature selection of the same
/// scan, both in the sensor frame.
struct RoomRegistration {
  FeatureSet map_features;
  FeatureSet features;
  LocalFeatureMap map;
};

inline RoomRegistration room_registration() {
  const sim::SimFrame f = sim::generate_frame(still_room(), 0);
  PointCloud cloud = f.cloud;
  for (Point& p : cloud.points) p.label = Label::make_static();
  RoomRegistration r{{}, {}, LocalFeatureMap(LocalMapConfig{1e-4, 30.0})};
  FeatureConfig dense;
  dense.max_edges_per_sector = 1u << 20;
  dense.max_planars_per_sector = 1u << 20;
  dense.min_feature_spacing = 0.0;
  r.map_features = extract_features(cloud, dense);
  r.features = extract_features(cloud, FeatureConfig{});
  r.map.update(r.map_features, Pose::identity());
  return r;
}

/// The feature set as seen from a sensor displaced by `offset`: registering
/// it against the map from identity must recover `offset`.
inline FeatureSet displaced(const FeatureSet& f, const Pose& offset) {
  FeatureSet out = f;
  const Pose inv = offset.inverse();
  for (auto& e : out.edges) e.position = inv * e.position;
  for (auto& p : out.planars) p.position = inv * p.position;
  return out;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("dynslam_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace dynslam::test
