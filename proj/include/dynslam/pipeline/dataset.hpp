#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dynslam/core/trajectory.hpp"
#include "dynslam/fusion/camera.hpp"
#include "dynslam/mask/segmentation.hpp"

namespace dynslam {

class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::int64_t frame_id, const std::string& what);
  std::int64_t frame_id() const { return frame_id_; }

 private:
  std::int64_t frame_id_;
};

struct FrameInput {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  PointCloud cloud;
  std::optional<SegmentationResult> segmentation;
  /// Ground-truth label bytes, when the dataset provides them.
  std::vector<std::uint8_t> ground_truth_labels;
};

/// Directory layout: frames/NNNNNN.mmpc, masks/NNNNNN.{png,json},
/// calib.json, optional groundtruth.txt and labels/NNNNNN.bin.
class Dataset {
 public:
  /// Throws std::runtime_error for a missing directory, calibration or
  /// empty frame list.
  Dataset(const std::filesystem::path& dir, double fallback_frame_rate = 10.0);

  std::size_t size() const { return frame_ids_.size(); }
  const std::vector<std::int64_t>& frame_ids() const { return frame_ids_; }
  const CameraModel& camera() const { return camera_; }
  const std::optional<Trajectory>& ground_truth() const { return ground_truth_; }
  const std::filesystem::path& dir() const { return dir_; }

  /// Loads frame `index` (position in frame_ids()). Masks are loaded only
  /// when requested. Throws DatasetError naming the frame.
  FrameInput load(std::size_t index, bool with_masks, const ClassTable& classes) const;

 private:
  std::filesystem::path dir_;
  std::vector<std::int64_t> frame_ids_;
  CameraModel camera_;
  std::optional<Trajectory> ground_truth_;
  double frame_rate_;
};

}  // namespace dynslam
