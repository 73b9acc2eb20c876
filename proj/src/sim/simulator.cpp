#include "dynslam/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "dynslam/core/cloud_io.hpp"
#include "dynslam/core/trajectory.hpp"
#include "dynslam/mask/morphology.hpp"
#include "dynslam/sim/raycast.hpp"

namespace dynslam::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(seed) ^ frame) ^ stream);
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string frame_stem(std::int64_t frame_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(frame_id));
  return buf;
}

std::vector<Vec3> scan_directions(const SensorConfig& sensor) {
  const double deg = std::numbers::pi / 180.0;
  const double half_az = 0.5 * sensor.fov_horizontal_deg * deg;
  const double s_lo = std::sin(-0.5 * sensor.fov_vertical_deg * deg);
  const double s_hi = -s_lo;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  const std::size_t n = sensor.points_per_scan;
  std::vector<Vec3> dirs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double s = s_lo + f * (s_hi - s_lo);
    const double g = std::fmod(static_cast<double>(i) * golden, 1.0);
    const double az = -half_az + g * 2.0 * half_az;
    const double c = std::sqrt(1.0 - s * s);
    dirs[i] = Vec3(c * std::cos(az), c * std::sin(az), s);
  }
  return dirs;
}

SimFrame generate_frame(const SceneConfig& config, std::size_t index) {
  const ClassTable classes = ClassTable::defaults();
  SimFrame f;
  f.frame_id = static_cast<std::int64_t>(index);
  f.timestamp = static_cast<double>(index) / config.frame_rate;
  f.ground_truth = sensor_pose_at(config.trajectory, f.timestamp);
  const SceneSnapshot scene(config, f.timestamp);
  const Pose& T = f.ground_truth;
  const Mat3 R = T.rotation_matrix();

  // Camera image: one ray through each pixel center.
  const CameraModel& cam = config.camera;
  const Mat3 Re_t = cam.extrinsic.rotation_matrix().transpose();
  const Vec3 cam_origin = T * (-(Re_t * cam.extrinsic.translation()));
  f.image.width = cam.width;
  f.image.height = cam.height;
  f.image.pixels.assign(static_cast<std::size_t>(cam.width) * cam.height, Rgb{});
  std::vector<BinaryImage> silhouettes(config.moving_objects.size(),
                                       BinaryImage(cam.width, cam.height));
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const Vec3 dc((u + 0.5 - cam.cx) / cam.fx, (v + 0.5 - cam.cy) / cam.fy, 1.0);
      const Vec3 dir = R * (Re_t * dc.normalized());
      const auto hit = scene.cast(cam_origin, dir, std::numeric_limits<double>::infinity());
      if (!hit) continue;
      const SurfaceInfo& s = scene.surface(hit->surface);
      f.image.pixels[static_cast<std::size_t>(v) * cam.width + u] = s.color;
      if (s.moving_index >= 0) silhouettes[static_cast<std::size_t>(s.moving_index)].set(u, v);
    }
  }

  f.segmentation.frame_id = f.frame_id;
  f.segmentation.width = cam.width;
  f.segmentation.height = cam.height;
  for (std::size_t k = 0; k < silhouettes.size(); ++k) {
    if (silhouettes[k].count() == 0) continue;
    const MovingObject& m = config.moving_objects[k];
    const auto cls = classes.id_of(m.class_name);
    if (!cls) throw std::invalid_argument("scene: unknown class '" + m.class_name + "'");
    InstanceMask inst;
    inst.id = static_cast<int>(k) + 1;
    inst.class_id = *cls;
    inst.class_name = m.class_name;
    inst.confidence = 1.0;
    inst.bbox = silhouettes[k].bounding_box();
    inst.bitmap = std::move(silhouettes[k]);
    f.segmentation.instances.push_back(std::move(inst));
  }

  // Range scan.
  std::mt19937_64 rng(frame_seed(config.seed, index, kNoiseStream));
  std::normal_distribution<double> noise(0.0, 1.0);
  const Vec3 origin = T.translation();
  f.cloud.frame_id = f.frame_id;
  f.cloud.timestamp = f.timestamp;
  for (const Vec3& d : scan_directions(config.sensor)) {
    const auto hit = scene.cast(origin, R * d, config.sensor.max_range);
    // One draw per ray keeps the noise stream aligned across scenes.
    const double n = noise(rng);
    if (!hit) continue;
    Point p;
    p.position = d * (hit->distance + config.sensor.range_noise * n);
    p.scan_index = static_cast<std::uint32_t>(f.cloud.size());
    f.cloud.points.push_back(p);
    const int k = scene.surface(hit->surface).moving_index;
    f.ground_truth_labels.push_back(
        k >= 0 ? Label::make_dynamic(static_cast<std::uint16_t>(k + 1)).to_byte()
               : Label::make_static().to_byte());
    f.surface.push_back(hit->surface);
  }
  f.cloud = colorize(f.cloud, f.image, cam);
  for (auto& p : f.cloud.points) p.label = Label{};
  return f;
}

std::vector<SimFrame> generate_sequence(const SceneConfig& config) {
  config.validate();
  std::vector<SimFrame> frames;
  frames.reserve(config.frames);
  for (std::size_t k = 0; k < config.frames; ++k) frames.push_back(generate_frame(config, k));
  return frames;
}

SegmentationResult degrade_segmentation(const SegmentationResult& seg, const MaskDegradation& d,
                                        std::uint64_t seed) {
  d.validate();
  std::mt19937_64 rng(seed);
  SegmentationResult out = seg;
  out.instances.clear();
  const bool dropped = unit_draw(rng) < d.dropout;
  const ClassTable classes = ClassTable::defaults();
  std::vector<const InstanceMask*> order;
  for (const auto& inst : seg.instances) order.push_back(&inst);
  std::sort(order.begin(), order.end(),
            [](const InstanceMask* a, const InstanceMask* b) { return a->id < b->id; });
  for (const InstanceMask* src : order) {
    const bool misclassified = unit_draw(rng) < d.misclassification;
    const bool from_top = unit_draw(rng) < 0.5;
    if (dropped) continue;
    InstanceMask inst = *src;
    if (misclassified) {
      const auto id = classes.id_of(d.misclassified_as);
      if (!id) throw std::invalid_argument("degradation: unknown class '" + d.misclassified_as + "'");
      inst.class_id = *id;
      inst.class_name = d.misclassified_as;
    }
    const PixelRect box = inst.bitmap.bounding_box();
    const int rows = static_cast<int>(std::lround(d.truncation * box.height));
    for (int r = 0; r < rows; ++r) {
      const int y = from_top ? box.y + r : box.y + box.height - 1 - r;
      std::fill_n(inst.bitmap.row(y) + box.x, box.width, 0);
    }
    if (d.erosion_radius > 0) inst.bitmap = erode(inst.bitmap, d.erosion_radius);
    inst.bbox = inst.bitmap.bounding_box();
    if (inst.bbox.empty()) continue;
    out.instances.push_back(std::move(inst));
  }
  return out;
}

void degrade_masks(std::vector<SimFrame>& frames, const MaskDegradation& d, std::uint64_t seed) {
  if (d.is_identity()) return;
  for (auto& f : frames) {
    f.segmentation = degrade_segmentation(
        f.segmentation, d, frame_seed(seed, static_cast<std::uint64_t>(f.frame_id), kDegradeStream));
  }
}

void write_dataset(const std::filesystem::path& dir, const SceneConfig& config,
                   const std::vector<SimFrame>& frames) {
  namespace fs = std::filesystem;
  for (const char* sub : {"frames", "masks", "labels"}) fs::create_directories(dir / sub);
  save_calibration(dir / "calib.json", config.camera);
  Trajectory gt;
  for (const auto& f : frames) {
    const std::string stem = frame_stem(f.frame_id);
    write_mmpc(dir / "frames" / (stem + ".mmpc"), f.cloud);
    save_segmentation(dir / "masks" / stem, f.segmentation);
    std::ofstream lab(dir / "labels" / (stem + ".bin"), std::ios::binary);
    if (!lab) throw std::runtime_error("cannot write labels for frame " + stem);
    lab.write(reinterpret_cast<const char*>(f.ground_truth_labels.data()),
              static_cast<std::streamsize>(f.ground_truth_labels.size()));
    gt.push_back({f.timestamp, f.ground_truth});
  }
  write_tum(dir / "groundtruth.txt", gt);
}

std::vector<std::uint8_t> read_label_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open label file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace dynslam::sim
