#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "dynslam/mapping/dynamic_map.hpp"
#include "dynslam/mapping/static_map.hpp"
#include "json.hpp"
#include "support.hpp"

namespace dynslam {
namespace {

std::set<std::tuple<long, long, long>> voxel_keys(const std::vector<Vec3>& pts, double leaf) {
  std::set<std::tuple<long, long, long>> keys;
  for (const auto& p : pts) {
    keys.emplace(long(std::floor(p.x() / leaf)), long(std::floor(p.y() / leaf)),
                 long(std::floor(p.z() / leaf)));
  }
  return keys;
}

TEST(StaticMap, NonKeyframeIsNoOp) {
  std::mt19937_64 rng(81);
  GlobalStaticMap map;
  map.update(make_cloud(test::random_points(rng, 100, 2.0)), Pose::identity(), false);
  EXPECT_EQ(map.size(), 0u);
  EXPECT_EQ(map.keyframes(), 0u);
}

TEST(StaticMap, FirstKeyframeIsVoxelFiltered) {
  std::mt19937_64 rng(82);
  const auto pts = test::random_points(rng, 5000, 1.0);
  const Pose pose = test::random_pose(rng, 3.0, 1.0);
  const GlobalStaticMap map =
      update_static_map(GlobalStaticMap(0.1), make_cloud(pts), pose, true);
  std::vector<Vec3> world;
  for (const auto& p : pts) world.push_back(pose * p);
  EXPECT_EQ(map.size(), voxel_keys(world, 0.1).size());
  EXPECT_EQ(map.keyframes(), 1u);
  // Each map point is a centroid of world points, so it sits inside its voxel.
  const auto keys = voxel_keys(world, 0.1);
  for (const auto& p : map.cloud().points) {
    EXPECT_TRUE(keys.contains({long(std::floor(p.position.x() / 0.1)),
                               long(std::floor(p.position.y() / 0.1)),
                               long(std::floor(p.position.z() / 0.1))}));
  }
}

TEST(StaticMap, SkipsDynamicPointsAndStaysUnique) {
  std::mt19937_64 rng(83);
  GlobalStaticMap map(0.05);
  std::vector<Vec3> static_world;
  for (int k = 0; k < 10; ++k) {
    PointCloud c = make_cloud(test::random_points(rng, 800, 1.5));
    const Pose pose = test::random_pose(rng, 0.5, 0.3);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i % 4 == 0) {
        c[i].label = Label::make_dynamic(1);
        c[i].position = Vec3(50, 50, 50) + c[i].position;  // far from anything static
      } else {
        static_world.push_back(pose * c[i].position);
      }
    }
    map.update(c, pose, true);
  }
  const PointCloud cloud = map.cloud();
  EXPECT_EQ(cloud.size(), voxel_keys(static_world, 0.05).size());
  std::set<std::tuple<long, long, long>> seen;
  for (const auto& p : cloud.points) {
    EXPECT_FALSE(p.label.is_dynamic());
    EXPECT_LT(p.position.norm(), 10.0);
    EXPECT_TRUE(seen.emplace(long(std::floor(p.position.x() / 0.05)),
                             long(std::floor(p.position.y() / 0.05)),
                             long(std::floor(p.position.z() / 0.05)))
                    .second);
  }
}

TEST(StaticMap, TaintFlagsCountVoxels) {
  GlobalStaticMap map(1.0);
  PointCloud c = make_cloud({Vec3(0.1, 0.1, 0.1), Vec3(0.2, 0.2, 0.2), Vec3(3.5, 0.5, 0.5)});
  const std::vector<std::uint8_t> taint{1, 1, 0};
  map.update(c, Pose::identity(), true, nullptr, nullptr, taint);
  EXPECT_EQ(map.size(), 2u);
  EXPECT_EQ(map.tainted_count(), 1u);
  EXPECT_THROW(map.update(c, Pose::identity(), true, nullptr, nullptr,
                          std::vector<std::uint8_t>{1}),
               std::invalid_argument);
}

TEST(StaticMap, ColorsFromImage) {
  CameraModel cam;
  cam.fx = cam.fy = 10;
  cam.cx = 2;
  cam.cy = 2;
  cam.width = 4;
  cam.height = 4;
  // Camera looks along +z of the sensor frame.
  ColorImage img{4, 4, std::vector<Rgb>(16, Rgb{10, 20, 30})};
  PointCloud c = make_cloud({Vec3(0, 0, 5)});
  GlobalStaticMap map(0.5);
  map.update(c, Pose::identity(), true, &img, &cam);
  ASSERT_EQ(map.size(), 1u);
  EXPECT_EQ(map.cloud()[0].color, (Rgb{10, 20, 30}));
}

TEST(StaticMap, RejectsNonFinitePose) {
  GlobalStaticMap map;
  const Pose bad = Pose::from_translation(Vec3(std::nan(""), 0, 0));
  EXPECT_THROW(map.update(PointCloud{}, bad, true), std::invalid_argument);
}

PointCloud dynamic_cloud(const std::vector<std::pair<Vec3, std::uint16_t>>& pts) {
  PointCloud c;
  for (const auto& [p, inst] : pts) {
    Point q;
    q.position = p;
    q.label = Label::make_dynamic(inst);
    c.points.push_back(q);
  }
  reindex(c);
  return c;
}

TEST(DynamicMap, EmptyInput) {
  const DynamicMap m = update_dynamic_map(PointCloud{}, Pose::identity(), 4);
  EXPECT_EQ(m.frame_id, 4);
  EXPECT_TRUE(m.boxes.empty());
  EXPECT_TRUE(m.points.empty());
}

TEST(DynamicMap, BoxesContainTheirPoints) {
  std::mt19937_64 rng(84);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<Vec3, std::uint16_t>> pts;
    const int objects = 1 + int(rng() % 4);
    for (int i = 0; i < 300; ++i) {
      const auto inst = std::uint16_t(1 + rng() % objects);
      pts.emplace_back(test::random_vec(rng, -1, 1) + Vec3(3.0 * inst, 0, 0), inst);
    }
    const Pose pose = test::random_pose(rng, 2.0, 3.0);
    const DynamicMap m = update_dynamic_map(dynamic_cloud(pts), pose, trial);
    std::set<std::uint16_t> ids;
    for (const auto& [p, inst] : pts) ids.insert(inst);
    ASSERT_EQ(m.boxes.size(), ids.size());
    std::size_t total = 0;
    for (const auto& b : m.boxes) {
      total += b.point_count;
      // Tight: every face touches a point of the instance.
      Vec3 lo = Vec3::Constant(1e9), hi = Vec3::Constant(-1e9);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].second != b.instance) continue;
        const Vec3& w = m.points[i].position;
        EXPECT_LT((w - pose * pts[i].first).norm(), 1e-12);
        EXPECT_TRUE(b.contains(w));
        lo = lo.cwiseMin(w);
        hi = hi.cwiseMax(w);
      }
      EXPECT_LT((b.min - lo).norm(), 1e-12);
      EXPECT_LT((b.max - hi).norm(), 1e-12);
    }
    EXPECT_EQ(total, pts.size());
  }
}

TEST(DynamicMap, SingleObjectAndMajorityClass) {
  const PointCloud c =
      dynamic_cloud({{Vec3(0, 0, 0), 2}, {Vec3(1, 2, 3), 2}, {Vec3(0.5, -1, 1), 2}});
  const std::vector<int> cls{3, 1, 3};
  const DynamicMap m = update_dynamic_map(c, Pose::identity(), 0, cls);
  ASSERT_EQ(m.boxes.size(), 1u);
  EXPECT_EQ(m.boxes[0].min, Vec3(0, -1, 0));
  EXPECT_EQ(m.boxes[0].max, Vec3(1, 2, 3));
  EXPECT_EQ(m.boxes[0].class_id, 3);
  EXPECT_EQ(update_dynamic_map(dynamic_cloud({{Vec3::Zero(), 1}, {Vec3::Ones(), 1}}),
                               Pose::identity(), 0, std::vector<int>{4, 1})
                .boxes[0]
                .class_id,
            1);
  EXPECT_THROW(update_dynamic_map(c, Pose::identity(), 0, std::vector<int>{1}),
               std::invalid_argument);
}

TEST(DynamicMap, JsonExport) {
  test::TempDir dir("boxes");
  const DynamicMap m = update_dynamic_map(
      dynamic_cloud({{Vec3(0, 0, 0), 1}, {Vec3(1, 1, 1), 1}, {Vec3(5, 5, 5), 2}}),
      Pose::from_translation(Vec3(1, 0, 0)), 12);
  write_boxes_json(dir.path() / "b.json", m);
  std::ifstream in(dir.path() / "b.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["frame_id"], 12);
  ASSERT_EQ(j["boxes"].size(), 2u);
  EXPECT_EQ(j["boxes"][0]["points"], 2);
  EXPECT_DOUBLE_EQ(j["boxes"][0]["min"][0].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j["boxes"][1]["max"][2].get<double>(), 5.0);
}

}  // namespace
}  // namespace dynslam
