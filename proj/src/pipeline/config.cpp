#include "dynslam/pipeline/config.hpp"

#include <set>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

namespace dynslam {

AblationMode parse_mode(const std::string& s) {
  if (s == "none") return AblationMode::None;
  if (s == "vision" || s == "vision-only") return AblationMode::Vision;
  if (s == "multimodal") return AblationMode::Multimodal;
  throw std::invalid_argument("unknown mode '" + s + "' (expected none, vision, multimodal)");
}

std::string to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::None: return "none";
    case AblationMode::Vision: return "vision";
    case AblationMode::Multimodal: return "multimodal";
  }
  return "?";
}

void PipelineConfig::validate() const {
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw std::invalid_argument("config: min_confidence must be in [0, 1]");
  }
  if (dilation_radius < 0) throw std::invalid_argument("config: dilation_radius must be >= 0");
  if (!(frame_rate > 0.0)) throw std::invalid_argument("config: frame_rate must be > 0");
  if (!(static_map_leaf > 0.0)) throw std::invalid_argument("config: static_map.leaf must be > 0");
  if (!(local_map.leaf > 0.0)) throw std::invalid_argument("config: local_map.leaf must be > 0");
  if (!(local_map.window_radius > 0.0)) {
    throw std::invalid_argument("config: local_map.window_radius must be > 0");
  }
  fusion.validate();
  features.validate();
  registration.validate();
  keyframe.validate();
}

namespace {

class Section {
 public:
  Section(const YAML::Node& node, std::string name) : node_(node), name_(std::move(name)) {
    if (node_ && !node_.IsMap()) throw std::invalid_argument(name_ + ": expected a mapping");
  }

  template <class T>
  Section& get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_) return *this;
    if (const auto v = node_[key]) {
      try {
        out = v.as<T>();
      } catch (const YAML::Exception&) {
        throw std::invalid_argument(name_ + "." + key + ": wrong type");
      }
    }
    return *this;
  }

  Section& known(const std::string& key) {
    seen_.insert(key);
    return *this;
  }

  void finish() const {
    if (!node_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw std::invalid_argument(name_ + ": unknown key '" + key + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  PipelineConfig c;
  if (root.IsNull()) return c;

  std::string mode = to_string(c.mode);
  Section top(root, "config");
  top.get("mode", mode)
      .get("dynamic_classes", c.dynamic_classes)
      .get("min_confidence", c.min_confidence)
      .get("dilation_radius", c.dilation_radius)
      .get("frame_rate", c.frame_rate);
  for (const char* s : {"fusion", "features", "local_map", "registration", "keyframe", "static_map"}) {
    top.known(s);  // parsed below
  }
  top.finish();
  c.mode = parse_mode(mode);

  Section fusion(root["fusion"], "fusion");
  fusion.get("cluster_leaf", c.fusion.cluster_leaf)
      .get("cluster_tolerance", c.fusion.cluster_tolerance)
      .get("min_cluster_size", c.fusion.min_cluster_size)
      .get("max_cluster_size", c.fusion.max_cluster_size)
      .get("relabel_radius", c.fusion.relabel_radius)
      .get("dynamic_threshold", c.fusion.dynamic_threshold)
      .finish();

  Section feat(root["features"], "features");
  feat.get("smoothness_radius", c.features.smoothness_radius)
      .get("min_neighbors", c.features.min_neighbors)
      .get("edge_threshold", c.features.edge_threshold)
      .get("planar_threshold", c.features.planar_threshold)
      .get("sectors", c.features.sectors)
      .get("max_edges_per_sector", c.features.max_edges_per_sector)
      .get("max_planars_per_sector", c.features.max_planars_per_sector)
      .get("min_feature_spacing", c.features.min_feature_spacing)
      .finish();

  Section lm(root["local_map"], "local_map");
  lm.get("leaf", c.local_map.leaf).get("window_radius", c.local_map.window_radius).finish();

  auto& r = c.registration;
  Section reg(root["registration"], "registration");
  reg.get("max_iterations", r.max_iterations)
      .get("convergence_step", r.convergence_step)
      .get("outlier_gate", r.outlier_gate)
      .get("tight_outlier_gate", r.tight_outlier_gate)
      .get("tighten_after", r.tighten_after)
      .get("fine_outlier_gate", r.fine_outlier_gate)
      .get("fine_after", r.fine_after)
      .get("max_neighbor_distance", r.max_neighbor_distance)
      .get("min_map_edges", r.min_map_edges)
      .get("min_map_planars", r.min_map_planars)
      .get("min_correspondences", r.min_correspondences)
      .get("max_step_halvings", r.max_step_halvings)
      .finish();

  Section kf(root["keyframe"], "keyframe");
  kf.get("translation", c.keyframe.translation).get("rotation", c.keyframe.rotation).finish();

  Section sm(root["static_map"], "static_map");
  sm.get("leaf", c.static_map_leaf).finish();

  c.validate();
  return c;
}

}  // namespace dynslam
