#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dynslam/fusion/fusion.hpp"
#include "dynslam/odometry/features.hpp"
#include "dynslam/odometry/keyframe.hpp"
#include "dynslam/odometry/local_map.hpp"
#include "dynslam/odometry/registration.hpp"

namespace dynslam {

/// none: no labeling, every point is static. vision: the dilated mask decides
/// alone. multimodal: mask labels refined by cluster fusion.
enum class AblationMode { None, Vision, Multimodal };

AblationMode parse_mode(const std::string& s);
std::string to_string(AblationMode mode);

struct PipelineConfig {
  AblationMode mode = AblationMode::Multimodal;
  std::vector<std::string> dynamic_classes{"person", "agv", "forklift"};
  double min_confidence = 0.5;
  int dilation_radius = 12;  // pixels
  double frame_rate = 10.0; // only used when the dataset has no timestamps
  FusionParams fusion;
  FeatureConfig features;
  LocalMapConfig local_map;
  RegistrationConfig registration;
  KeyframePolicy keyframe;
  double static_map_leaf = 0.05;

  void validate() const;
};

/// YAML file. Sections: mode, dynamic_classes, min_confidence,
/// dilation_radius, frame_rate, fusion{...}, features{...}, local_map{...},
/// registration{...}, keyframe{...}, static_map{leaf}. Keys mirror the field
/// names of the corresponding structs; unknown keys are rejected.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace dynslam
