#include <gtest/gtest.h>

#include <fstream>

#include "dynslam/mask/morphology.hpp"
#include "dynslam/mask/segmentation.hpp"
#include "support.hpp"

#ifndef DYNSLAM_FIXTURES
#error "DYNSLAM_FIXTURES must point at tests/fixtures"
#endif

namespace dynslam {
namespace {

const std::filesystem::path kFixtures = DYNSLAM_FIXTURES;

InstanceMask rect_instance(int id, int class_id, const std::string& name, int w, int h,
                           PixelRect r) {
  InstanceMask m;
  m.id = id;
  m.class_id = class_id;
  m.class_name = name;
  m.bitmap = BinaryImage(w, h);
  for (int y = r.y; y < r.y + r.height; ++y) {
    for (int x = r.x; x < r.x + r.width; ++x) m.bitmap.set(x, y);
  }
  m.bbox = m.bitmap.bounding_box();
  return m;
}

SegmentationResult blank(int w, int h) {
  SegmentationResult s;
  s.width = w;
  s.height = h;
  return s;
}

TEST(Segmentation, FixtureWithThreeInstances) {
  const auto seg = load_segmentation(kFixtures / "seg3.json", ClassTable::defaults());
  EXPECT_EQ(seg.frame_id, 7);
  EXPECT_EQ(seg.width, 16);
  EXPECT_EQ(seg.height, 12);
  ASSERT_EQ(seg.instances.size(), 3u);
  EXPECT_EQ(seg.instances[0].class_name, "person");
  EXPECT_EQ(seg.instances[0].bbox, (PixelRect{2, 1, 3, 4}));
  EXPECT_EQ(seg.instances[0].bitmap.count(), 12u);
  EXPECT_EQ(seg.instances[1].class_id, 5);
  EXPECT_EQ(seg.instances[1].bbox, (PixelRect{10, 2, 4, 2}));
  EXPECT_EQ(seg.instances[2].class_name, "agv");
  EXPECT_EQ(seg.instances[2].bbox, (PixelRect{5, 7, 4, 4}));
  EXPECT_EQ(seg.instances[2].bitmap.count(), 10u);
  EXPECT_DOUBLE_EQ(seg.instances[2].confidence, 0.4);
  // The bare stem and the png path resolve to the same frame.
  EXPECT_EQ(load_segmentation(kFixtures / "seg3", ClassTable::defaults()).instances.size(), 3u);
  EXPECT_EQ(load_segmentation(kFixtures / "seg3.png", ClassTable::defaults()).frame_id, 7);
}

TEST(Segmentation, EmptyFrameRoundTrip) {
  test::TempDir dir("seg_empty");
  SegmentationResult s = blank(8, 6);
  s.frame_id = 3;
  save_segmentation(dir.path() / "000003", s);
  const auto back = load_segmentation(dir.path() / "000003", ClassTable::defaults());
  EXPECT_EQ(back.frame_id, 3);
  EXPECT_TRUE(back.instances.empty());
}

TEST(Segmentation, FourPixelSquare) {
  test::TempDir dir("seg_square");
  SegmentationResult s = blank(10, 10);
  s.instances.push_back(rect_instance(1, 1, "person", 10, 10, {4, 4, 2, 2}));
  save_segmentation(dir.path() / "f", s);
  const auto back = load_segmentation(dir.path() / "f", ClassTable::defaults());
  ASSERT_EQ(back.instances.size(), 1u);
  EXPECT_EQ(back.instances[0].bbox, (PixelRect{4, 4, 2, 2}));
  EXPECT_EQ(back.instances[0].bitmap, s.instances[0].bitmap);
}

void write_fixture_variant(const std::filesystem::path& stem, const std::string& json_text) {
  std::filesystem::copy_file(kFixtures / "seg3.png", stem.string() + ".png");
  std::ofstream(stem.string() + ".json") << json_text;
}

TEST(Segmentation, TypedErrorsNameFrameAndInstance) {
  test::TempDir dir("seg_err");
  const auto classes = ClassTable::defaults();

  write_fixture_variant(dir.path() / "unknown_class",
                        R"({"frame_id": 9, "width": 16, "height": 12, "instances": [
      {"id": 1, "class_name": "person", "class_id": 1, "confidence": 1, "bbox": [2,1,3,4]},
      {"id": 2, "class_name": "ghost", "class_id": 77, "confidence": 1, "bbox": [10,2,4,2]},
      {"id": 3, "class_name": "agv", "class_id": 2, "confidence": 1, "bbox": [5,7,4,4]}]})");
  try {
    load_segmentation(dir.path() / "unknown_class", classes);
    FAIL() << "unknown class accepted";
  } catch (const SegmentationError& e) {
    EXPECT_EQ(e.frame_id(), 9);
    EXPECT_EQ(e.instance_id(), 2);
  }

  write_fixture_variant(dir.path() / "size", R"({"frame_id": 4, "width": 20, "height": 12,
      "instances": []})");
  try {
    load_segmentation(dir.path() / "size", classes);
    FAIL() << "size mismatch accepted";
  } catch (const SegmentationError& e) {
    EXPECT_EQ(e.frame_id(), 4);
  }

  write_fixture_variant(dir.path() / "bbox",
                        R"({"frame_id": 5, "width": 16, "height": 12, "instances": [
      {"id": 1, "class_name": "person", "class_id": 1, "confidence": 1, "bbox": [2,1,3,5]},
      {"id": 2, "class_name": "chair", "class_id": 5, "confidence": 1, "bbox": [10,2,4,2]},
      {"id": 3, "class_name": "agv", "class_id": 2, "confidence": 1, "bbox": [5,7,4,4]}]})");
  try {
    load_segmentation(dir.path() / "bbox", classes);
    FAIL() << "loose bbox accepted";
  } catch (const SegmentationError& e) {
    EXPECT_EQ(e.instance_id(), 1);
  }

  write_fixture_variant(dir.path() / "malformed", R"({"frame_id": 6, "width": 16})");
  EXPECT_THROW(load_segmentation(dir.path() / "malformed", classes), SegmentationError);
  EXPECT_THROW(load_segmentation(dir.path() / "missing", classes), SegmentationError);
}

TEST(Flatten, NoDynamicClassesIsClear) {
  const auto seg = load_segmentation(kFixtures / "seg3", ClassTable::defaults());
  EXPECT_EQ(flatten_dynamic(seg, {}).count(), 0u);
}

TEST(Flatten, ClassAndConfidenceFilter) {
  const auto seg = load_segmentation(kFixtures / "seg3", ClassTable::defaults());
  EXPECT_EQ(flatten_dynamic(seg, {1, 2}).count(), 22u);
  EXPECT_EQ(flatten_dynamic(seg, {1, 2}, 0.5).count(), 12u);
}

TEST(Flatten, DisjointMasksAddUp) {
  SegmentationResult s = blank(20, 20);
  s.instances.push_back(rect_instance(1, 1, "person", 20, 20, {0, 0, 3, 3}));
  s.instances.push_back(rect_instance(2, 1, "person", 20, 20, {10, 10, 4, 2}));
  EXPECT_EQ(flatten_dynamic(s, {1}).count(), 17u);
}

TEST(Flatten, OverlapMatchesPixelScan) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    SegmentationResult s = blank(40, 30);
    for (int i = 0; i < 2; ++i) {
      const int x = rng() % 30, y = rng() % 20;
      s.instances.push_back(rect_instance(i + 1, 1, "person", 40, 30,
                                          {x, y, 1 + int(rng() % 10), 1 + int(rng() % 10)}));
    }
    std::size_t overlap = 0;
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 40; ++x) {
        overlap += s.instances[0].bitmap.at(x, y) && s.instances[1].bitmap.at(x, y);
      }
    }
    EXPECT_EQ(flatten_dynamic(s, {1}).count(),
              s.instances[0].bitmap.count() + s.instances[1].bitmap.count() - overlap);
  }
}

TEST(Flatten, InstanceOrderDoesNotMatter) {
  std::mt19937_64 rng(42);
  SegmentationResult s = blank(32, 32);
  for (int i = 0; i < 5; ++i) {
    InstanceMask m;
    m.id = i + 1;
    m.class_id = 1 + i % 3;
    m.class_name = "x";
    m.bitmap = test::random_mask(rng, 32, 32, 0.1);
    s.instances.push_back(m);
  }
  const auto ref = flatten_dynamic(s, {1, 3});
  for (int k = 0; k < 10; ++k) {
    std::shuffle(s.instances.begin(), s.instances.end(), rng);
    EXPECT_EQ(flatten_dynamic(s, {1, 3}), ref);
  }
}

TEST(Dilate, SinglePixelGrowsToBlock) {
  BinaryImage m(7, 7);
  m.set(3, 3);
  const BinaryImage d = dilate(m, 1);
  EXPECT_EQ(d.count(), 9u);
  EXPECT_EQ(d.bounding_box(), (PixelRect{2, 2, 3, 3}));
  BinaryImage corner(5, 5);
  corner.set(0, 0);
  EXPECT_EQ(dilate(corner, 1).count(), 4u);
}

TEST(Dilate, RadiusZeroIsIdentity) {
  std::mt19937_64 rng(43);
  const BinaryImage m = test::random_mask(rng, 64, 64, 0.2);
  EXPECT_EQ(dilate(m, 0), m);
}

TEST(Dilate, MatchesNeighborhoodMax) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 1 + rng() % 70, h = 1 + rng() % 70;
    const BinaryImage m = test::random_mask(rng, w, h, test::uniform(rng, 0.0, 0.1));
    const int r = rng() % 6;
    EXPECT_EQ(dilate(m, r), test::dilate_reference(m, r)) << w << "x" << h << " r=" << r;
  }
}

TEST(Dilate, Extensive) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    const BinaryImage m = test::random_mask(rng, 64, 64, 0.05);
    for (int r = 0; r <= 4; ++r) EXPECT_TRUE(is_subset(m, dilate(m, r)));
  }
}

TEST(Dilate, Monotone) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 50; ++trial) {
    const BinaryImage small = test::random_mask(rng, 64, 64, 0.03);
    BinaryImage big = small;
    const BinaryImage extra = test::random_mask(rng, 64, 64, 0.03);
    for (std::size_t i = 0; i < big.data().size(); ++i) big.data()[i] |= extra.data()[i];
    for (int r = 0; r <= 4; ++r) EXPECT_TRUE(is_subset(dilate(small, r), dilate(big, r)));
  }
}

TEST(Dilate, RadiiCompose) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryImage m = test::random_mask(rng, 48, 40, 0.02);
    const int a = rng() % 4, b = rng() % 4;
    EXPECT_EQ(dilate(dilate(m, a), b), dilate(m, a + b));
  }
}

TEST(Erode, ShrinksAndTreatsBorderAsSet) {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryImage m = test::random_mask(rng, 40, 40, 0.7);
    EXPECT_TRUE(is_subset(erode(m, 1 + rng() % 3), m));
  }
  BinaryImage full(6, 6);
  for (auto& v : full.data()) v = 1;
  EXPECT_EQ(erode(full, 2), full);
}

}  // namespace
}  // namespace dynslam
