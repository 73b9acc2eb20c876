#include <gtest/gtest.h>

#include <set>

#include "dynslam/fusion/camera.hpp"
#include "dynslam/fusion/fusion.hpp"
#include "dynslam/mask/morphology.hpp"
#include "dynslam/mask/segmentation.hpp"
#include "dynslam/sim/simulator.hpp"
#include "support.hpp"

namespace dynslam {
namespace {

CameraModel toy_camera(int w, int h) {
  CameraModel c;
  c.fx = c.fy = 100;
  c.cx = c.cy = 50;
  c.width = w;
  c.height = h;
  return c;
}

TEST(Projection, OpticalAxis) {
  const auto p = project_point(toy_camera(100, 100), Vec3(0, 0, 1));
  ASSERT_TRUE(p);
  EXPECT_DOUBLE_EQ(p->u, 50);
  EXPECT_DOUBLE_EQ(p->v, 50);
  EXPECT_DOUBLE_EQ(p->depth, 1);
}

TEST(Projection, BehindCameraIsOutOfView) {
  EXPECT_FALSE(project_point(toy_camera(100, 100), Vec3(0, 0, -1)));
  EXPECT_FALSE(project_point(toy_camera(100, 100), Vec3(0, 0, 0)));
}

TEST(Projection, PinholeArithmetic) {
  const auto p = project_point(toy_camera(200, 100), Vec3(0.5, 0, 1));
  ASSERT_TRUE(p);
  EXPECT_DOUBLE_EQ(p->u, 100);
  // Same point, narrower image: lands exactly on the right border.
  EXPECT_FALSE(project_point(toy_camera(100, 100), Vec3(0.5, 0, 1)));
}

TEST(Projection, ExtrinsicApplied) {
  CameraModel c = toy_camera(100, 100);
  c.extrinsic = forward_looking_extrinsic();
  // Sensor +x is the optical axis, sensor +y (left) maps to smaller u.
  const auto p = project_point(c, Vec3(2, 0.2, 0));
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->u, 40, 1e-12);
  EXPECT_NEAR(p->v, 50, 1e-12);
  EXPECT_NEAR(p->depth, 2, 1e-12);
}

TEST(LabelPoints, ClearAndFullMasks) {
  std::mt19937_64 rng(51);
  const CameraModel cam = toy_camera(100, 100);
  std::vector<Vec3> pts;
  for (int i = 0; i < 200; ++i) {
    pts.emplace_back(test::uniform(rng, -0.4, 0.4), test::uniform(rng, -0.4, 0.4),
                     test::uniform(rng, 1, 3));
  }
  const PointCloud cloud = make_cloud(pts);
  BinaryImage mask(100, 100);
  for (const Point& p : label_points(cloud, mask, cam).points) EXPECT_TRUE(p.label.is_static());
  for (auto& v : mask.data()) v = 1;
  for (const Point& p : label_points(cloud, mask, cam).points) EXPECT_TRUE(p.label.is_dynamic());
  EXPECT_THROW(label_points(cloud, BinaryImage(99, 100), cam), std::invalid_argument);
}

TEST(LabelPoints, SilhouetteOfSimulatedObject) {
  const sim::SceneConfig scene = sim::default_scene();
  for (const std::size_t k : {0u, 9u, 23u, 37u}) {
    const sim::SimFrame f = sim::generate_frame(scene, k);
    ASSERT_FALSE(f.segmentation.instances.empty());
    const BinaryImage mask = flatten_dynamic(f.segmentation, {1});
    const PointCloud exact = label_points(f.cloud, mask, scene.camera);
    const PointCloud grown = label_points(f.cloud, dilate(mask, 1), scene.camera);
    const BinaryImage inner = erode(mask, 1);
    const auto pixel = project_cloud(scene.camera, f.cloud);
    std::size_t truth = 0;
    for (std::size_t i = 0; i < f.cloud.size(); ++i) {
      const bool gt = f.ground_truth_labels[i] >= 2;
      truth += gt;
      // Disagreement is confined to the one-pixel silhouette boundary.
      if (gt) {
        EXPECT_TRUE(grown[i].label.is_dynamic()) << "frame " << k << " point " << i;
      }
      if (exact[i].label.is_dynamic() && !gt) {
        EXPECT_FALSE(inner.data()[static_cast<std::size_t>(pixel[i])]) << "point " << i;
      }
    }
    EXPECT_GT(truth, 100u);
  }
}

TEST(Cluster, SeparatedBlobs) {
  std::mt19937_64 rng(52);
  std::vector<Vec3> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(test::random_vec(rng, 0, 0.05));
  for (int i = 0; i < 10; ++i) pts.push_back(Vec3(1, 0, 0) + test::random_vec(rng, 0, 0.05));
  const auto cl = euclidean_cluster(make_cloud(pts), 0.2, 1, 100);
  ASSERT_EQ(cl.size(), 2u);
  EXPECT_EQ(cl[0].size(), 10u);
  EXPECT_EQ(cl[1].size(), 10u);
  EXPECT_EQ(cl[0].point_ids.front(), 0u);
}

TEST(Cluster, ChainIsConnected) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 100; ++i) pts.emplace_back(0.1 * i, 0, 0);
  const auto cl = euclidean_cluster(make_cloud(pts), 0.15, 1, 1000);
  ASSERT_EQ(cl.size(), 1u);
  EXPECT_EQ(cl[0].size(), 100u);
}

TEST(Cluster, SizeFilterAndOrdering) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 3; ++i) pts.emplace_back(0.01 * i, 0, 0);    // 3
  for (int i = 0; i < 8; ++i) pts.emplace_back(5 + 0.01 * i, 0, 0);  // 8
  for (int i = 0; i < 5; ++i) pts.emplace_back(10 + 0.01 * i, 0, 0);  // 5
  for (int i = 0; i < 5; ++i) pts.emplace_back(-10 + 0.01 * i, 0, 0);  // 5
  const auto cl = euclidean_cluster(make_cloud(pts), 0.05, 4, 7);
  ASSERT_EQ(cl.size(), 2u);
  EXPECT_EQ(cl[0].point_ids.front(), 11u);  // ties broken by smallest member id
  EXPECT_EQ(cl[1].point_ids.front(), 16u);
  EXPECT_THROW(euclidean_cluster(make_cloud(pts), 0.0, 1, 2), std::invalid_argument);
  EXPECT_THROW(euclidean_cluster(make_cloud(pts), 0.1, 3, 2), std::invalid_argument);
}

TEST(Cluster, MatchesUnionFind) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = test::random_points(rng, 300, 1.0);
    const auto ref = test::components_reference(pts, 0.15);
    auto got = euclidean_cluster(make_cloud(pts), 0.15, 1, 100000);
    std::vector<std::vector<std::uint32_t>> parts;
    for (const auto& c : got) parts.push_back(c.point_ids);
    std::sort(parts.begin(), parts.end());
    EXPECT_EQ(parts, ref);
  }
}

TEST(Cluster, DynamicFraction) {
  PointCloud c = make_cloud({Vec3(0, 0, 0), Vec3(0.1, 0, 0), Vec3(0.2, 0, 0), Vec3(0.3, 0, 0)});
  c[1].label = Label::make_dynamic();
  c[2].label = Label::make_dynamic();
  c[3].label = Label::make_dynamic();
  const auto cl = euclidean_cluster(c, 0.15, 1, 10);
  ASSERT_EQ(cl.size(), 1u);
  EXPECT_DOUBLE_EQ(cl[0].dynamic_fraction, 0.75);
}

// A tight blob of n points, `dynamic` of them initially Dynamic.
void add_blob(PointCloud& c, const Vec3& center, int n, int dynamic, std::mt19937_64& rng) {
  for (int i = 0; i < n; ++i) {
    Point p;
    p.position = center + test::random_vec(rng, -0.05, 0.05);
    p.label = i < dynamic ? Label::make_dynamic() : Label::make_static();
    p.scan_index = static_cast<std::uint32_t>(c.size());
    c.points.push_back(p);
  }
}

TEST(FuseLabels, MostlyDynamicClusterTakesAll) {
  std::mt19937_64 rng(54);
  PointCloud c;
  add_blob(c, Vec3::Zero(), 100, 95, rng);
  auto out = fuse_labels(c, euclidean_cluster(c, 0.3, 1, 1000), 0.3, 0.9);
  EXPECT_EQ(out.dynamic_points.size(), 100u);
  EXPECT_TRUE(out.clusters[0].dynamic);
}

TEST(FuseLabels, StaticClusterStaysStatic) {
  std::mt19937_64 rng(55);
  PointCloud c;
  add_blob(c, Vec3::Zero(), 100, 0, rng);
  auto out = fuse_labels(c, euclidean_cluster(c, 0.3, 1, 1000), 0.3, 0.9);
  EXPECT_EQ(out.static_points.size(), 100u);
  EXPECT_FALSE(out.clusters[0].dynamic);
}

TEST(FuseLabels, ThresholdIsInclusive) {
  std::mt19937_64 rng(56);
  PointCloud c;
  add_blob(c, Vec3::Zero(), 100, 90, rng);
  EXPECT_EQ(fuse_labels(c, euclidean_cluster(c, 0.3, 1, 1000), 0.3, 0.9).dynamic_points.size(),
            100u);
  PointCloud d;
  add_blob(d, Vec3::Zero(), 100, 89, rng);
  EXPECT_EQ(fuse_labels(d, euclidean_cluster(d, 0.3, 1, 1000), 0.3, 0.9).dynamic_points.size(),
            0u);
}

TEST(FuseLabels, NeighborsPulledInAndIsolatedReleased) {
  std::mt19937_64 rng(57);
  PointCloud c;
  add_blob(c, Vec3::Zero(), 50, 50, rng);
  Point near;  // static, unclustered, within 0.3 m of the blob
  near.position = Vec3(0.28, 0, 0);
  near.label = Label::make_static();
  near.scan_index = 50;
  c.points.push_back(near);
  Point stray;  // dynamic, far from everything
  stray.position = Vec3(5, 5, 5);
  stray.label = Label::make_dynamic();
  stray.scan_index = 51;
  c.points.push_back(stray);
  const auto out = fuse_labels(c, euclidean_cluster(c, 0.1, 20, 1000), 0.3, 0.9);
  EXPECT_TRUE(out.labels[50].is_dynamic());
  EXPECT_TRUE(out.labels[51].is_static());
  EXPECT_THROW(fuse_labels(c, {}, 0.3, 0.0), std::invalid_argument);
  EXPECT_THROW(fuse_labels(c, {}, -1.0, 0.9), std::invalid_argument);
}

// Random scenes of blobs with mixed label fractions plus scattered points.
PointCloud random_scene(std::mt19937_64& rng) {
  PointCloud c;
  const int blobs = 2 + rng() % 5;
  for (int b = 0; b < blobs; ++b) {
    const int n = 20 + rng() % 60;
    const int dyn = std::uniform_int_distribution<int>(0, n)(rng);
    add_blob(c, test::random_vec(rng, -2, 2), n, dyn, rng);
  }
  for (int i = 0; i < 40; ++i) {
    Point p;
    p.position = test::random_vec(rng, -2.5, 2.5);
    p.label = rng() % 2 ? Label::make_dynamic() : Label::make_static();
    p.scan_index = static_cast<std::uint32_t>(c.size());
    c.points.push_back(p);
  }
  return c;
}

TEST(FuseLabels, RulesHoldOnRandomScenes) {
  std::mt19937_64 rng(58);
  const double radius = 0.3, threshold = 0.9;
  for (int trial = 0; trial < 100; ++trial) {
    const PointCloud c = random_scene(rng);
    const auto clusters = euclidean_cluster(c, 0.1, 10, 100000);
    const auto out = fuse_labels(c, clusters, radius, threshold);
    ASSERT_EQ(out.dynamic_points.size() + out.static_points.size(), c.size());
    ASSERT_EQ(out.labels.size(), c.size());

    std::vector<char> member(c.size(), 0);
    for (const auto& cl : out.clusters) {
      EXPECT_EQ(cl.dynamic, cl.dynamic_fraction >= threshold);
      if (!cl.dynamic) continue;
      for (const auto id : cl.point_ids) member[id] = 1;
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
      bool near = false;
      for (std::size_t j = 0; j < c.size() && !near; ++j) {
        near = member[j] && (c[i].position - c[j].position).norm() <= radius;
      }
      const bool expect_dynamic = member[i] || near;
      EXPECT_EQ(out.labels[i].is_dynamic(), expect_dynamic) << "trial " << trial << " point " << i;
    }
    std::set<std::uint32_t> seen;
    for (const auto& p : out.dynamic_points.points) EXPECT_TRUE(seen.insert(p.scan_index).second);
    for (const auto& p : out.static_points.points) EXPECT_TRUE(seen.insert(p.scan_index).second);
  }
}

TEST(FuseLabels, Deterministic) {
  std::mt19937_64 rng(59);
  const PointCloud c = random_scene(rng);
  const auto a = fuse_labels(c, euclidean_cluster(c, 0.1, 10, 1000), 0.3, 0.9);
  const auto b = fuse_labels(c, euclidean_cluster(c, 0.1, 10, 1000), 0.3, 0.9);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.owner, b.owner);
}

TEST(FuseFrame, PerfectMaskGivesObjectPlusRing) {
  const sim::SceneConfig scene = sim::default_scene();
  FusionParams params;
  for (const std::size_t k : {0u, 12u, 25u, 40u}) {
    const sim::SimFrame f = sim::generate_frame(scene, k);
    const BinaryImage mask = flatten_dynamic(f.segmentation, {1});
    const BinaryImage dilated = dilate(mask, 3);
    const auto out = fuse_frame(f.cloud, dilated, scene.camera, params);
    ASSERT_EQ(out.dynamic_points.size() + out.static_points.size(), f.cloud.size());
    const auto pixel = project_cloud(scene.camera, f.cloud);
    for (std::size_t i = 0; i < f.cloud.size(); ++i) {
      const bool gt = f.ground_truth_labels[i] >= 2;
      if (gt) {
        EXPECT_TRUE(out.labels[i].is_dynamic()) << "frame " << k << " point " << i;
      }
      if (out.labels[i].is_dynamic() && !gt) {
        ASSERT_GE(pixel[i], 0);
        EXPECT_TRUE(dilated.data()[static_cast<std::size_t>(pixel[i])]);
      }
    }
  }
}

TEST(FuseFrame, ErodedMaskRecovered) {
  const sim::SceneConfig scene = sim::default_scene();
  sim::MaskDegradation d;
  d.erosion_radius = 1;
  int checked = 0;
  for (std::size_t k = 0; k < 40; k += 3) {
    const sim::SimFrame f = sim::generate_frame(scene, k);
    const auto seg = sim::degrade_segmentation(f.segmentation, d, 1);
    const BinaryImage perfect = flatten_dynamic(f.segmentation, {1});
    const BinaryImage eroded = flatten_dynamic(seg, {1});
    // Only masks that still cover at least 90% of the object qualify.
    if (double(eroded.count()) < 0.9 * double(perfect.count())) continue;
    ++checked;
    const auto out = fuse_frame(f.cloud, dilate(eroded, 3), scene.camera, FusionParams{});
    std::size_t truth = 0, found = 0;
    for (std::size_t i = 0; i < f.cloud.size(); ++i) {
      if (f.ground_truth_labels[i] < 2) continue;
      ++truth;
      found += out.labels[i].is_dynamic();
    }
    EXPECT_GE(double(found), 0.99 * double(truth)) << "frame " << k;
  }
  EXPECT_GE(checked, 3);
}

TEST(FuseFrame, SplitByLabelsKeepsMaskVerdict) {
  PointCloud c = make_cloud({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)});
  c[0].label = Label::make_static();
  c[1].label = Label::make_dynamic(3);
  c[2].label = Label::make_static();
  const auto out = split_by_labels(c);
  ASSERT_EQ(out.dynamic_points.size(), 1u);
  EXPECT_EQ(out.dynamic_points[0].scan_index, 1u);
  EXPECT_EQ(out.static_points.size(), 2u);
}

}  // namespace
}  // namespace dynslam
