#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynslam/mapping/dynamic_map.hpp"
#include "dynslam/mapping/static_map.hpp"
#include "dynslam/pipeline/config.hpp"
#include "dynslam/pipeline/dataset.hpp"

namespace dynslam {

struct StageTimes {
  double label_ms = 0.0;
  double features_ms = 0.0;
  double registration_ms = 0.0;
  double mapping_ms = 0.0;

  double total_ms() const { return label_ms + features_ms + registration_ms + mapping_ms; }
};

struct FrameDiagnostics {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  std::size_t points = 0;
  std::size_t dynamic_points = 0;
  std::size_t edge_features = 0;
  std::size_t planar_features = 0;
  int iterations = 0;
  double cost = 0.0;
  std::size_t edge_inliers = 0;
  std::size_t planar_inliers = 0;
  bool keyframe = false;
  std::size_t boxes = 0;
  /// Against ground-truth labels when available, else negative.
  double dynamic_recall = -1.0;
  double static_false_positive = -1.0;
  StageTimes times;
  std::string error;  // empty when the frame processed cleanly
};

/// Sequential front end: label, extract features, register against the
/// local map, update local map, static map (keyframes only) and dynamic map.
class SlamPipeline {
 public:
  SlamPipeline(const PipelineConfig& config, const CameraModel& camera,
               const ClassTable& classes = ClassTable::defaults());

  /// Processes one frame. Registration failures are recorded in the
  /// diagnostics and the predicted pose is kept.
  const FrameDiagnostics& process(const FrameInput& frame);

  const Trajectory& trajectory() const { return trajectory_; }
  const std::vector<FrameDiagnostics>& diagnostics() const { return diagnostics_; }
  const GlobalStaticMap& static_map() const { return static_map_; }
  const DynamicMap& dynamic_map() const { return dynamic_map_; }
  const LocalFeatureMap& local_map() const { return local_map_; }
  const PipelineConfig& config() const { return config_; }

  /// Final label per input point of the last processed frame.
  const std::vector<Label>& last_labels() const { return last_labels_; }

 private:
  FusionOutput label(const FrameInput& frame) const;

  PipelineConfig config_;
  CameraModel camera_;
  std::set<int> dynamic_classes_;
  LocalFeatureMap local_map_;
  GlobalStaticMap static_map_;
  DynamicMap dynamic_map_;
  Trajectory trajectory_;
  std::optional<Pose> last_keyframe_;
  std::vector<FrameDiagnostics> diagnostics_;
  std::vector<Label> last_labels_;
};

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<FrameDiagnostics>& diagnostics);

struct RunSummary {
  std::size_t frames = 0;
  std::vector<std::int64_t> failed_frames;
  Trajectory trajectory;
  std::vector<FrameDiagnostics> diagnostics;
  std::size_t static_map_points = 0;
  std::size_t static_map_tainted = 0;
};

/// Runs the whole dataset and, if out_dir is non-empty, writes
/// trajectory.txt, diagnostics.csv, static_map.mmpc, static_map.xyz and
/// boxes/NNNNNN.json. Frames that fail to load are recorded and skipped.
RunSummary run_dataset(const Dataset& dataset, const PipelineConfig& config,
                       const std::filesystem::path& out_dir);

}  // namespace dynslam
