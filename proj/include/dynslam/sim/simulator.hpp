#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "dynslam/mask/segmentation.hpp"
#include "dynslam/sim/scene.hpp"

namespace dynslam::sim {

struct SimFrame {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  PointCloud cloud;                  // sensor frame, colored from the camera image
  SegmentationResult segmentation;   // exact silhouettes of moving objects
  Pose ground_truth;                 // sensor -> world
  /// Label byte per point: 1 = static surface, 2 + k = moving object k - 1.
  std::vector<std::uint8_t> ground_truth_labels;
  std::vector<int> surface;          // per point, SceneSnapshot surface id
  ColorImage image;
};

/// Independent seed for (frame, stream) derived from the master seed.
std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream);

inline constexpr std::uint64_t kNoiseStream = 1;
inline constexpr std::uint64_t kDegradeStream = 2;

/// Uniform in [0, 1) from the top 53 bits of one engine draw.
double unit_draw(std::mt19937_64& rng);

/// Sensor-frame unit ray directions: a golden-ratio lattice over the field
/// of view, uniform in azimuth and in sin(elevation).
std::vector<Vec3> scan_directions(const SensorConfig& sensor);

SimFrame generate_frame(const SceneConfig& config, std::size_t index);

/// Perfect masks; apply degrade_masks for the imperfect variants.
std::vector<SimFrame> generate_sequence(const SceneConfig& config);

/// Per frame, drawing from frame_seed(seed, frame, kDegradeStream) in a fixed
/// order: one dropout draw, then per instance (ascending id) a
/// misclassification draw and a truncation-side draw. Truncation clears
/// round(truncation * bbox height) rows from the top (draw < 0.5) or bottom;
/// erosion follows. Instances that end up empty are removed.
SegmentationResult degrade_segmentation(const SegmentationResult& seg, const MaskDegradation& d,
                                        std::uint64_t seed);
void degrade_masks(std::vector<SimFrame>& frames, const MaskDegradation& d, std::uint64_t seed);

/// frames/NNNNNN.mmpc, masks/NNNNNN.png + .json, labels/NNNNNN.bin,
/// calib.json, groundtruth.txt.
void write_dataset(const std::filesystem::path& dir, const SceneConfig& config,
                   const std::vector<SimFrame>& frames);

std::vector<std::uint8_t> read_label_file(const std::filesystem::path& path);

/// "000042"
std::string frame_stem(std::int64_t frame_id);

}  // namespace dynslam::sim
