#include "dynslam/pipeline/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "dynslam/core/cloud_io.hpp"
#include "dynslam/mask/morphology.hpp"

namespace dynslam {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

SlamPipeline::SlamPipeline(const PipelineConfig& config, const CameraModel& camera,
                           const ClassTable& classes)
    : config_(config),
      camera_(camera),
      local_map_(config.local_map),
      static_map_(config.static_map_leaf) {
  config_.validate();
  camera_.validate();
  dynamic_classes_ = classes.ids_of(config_.dynamic_classes);
}

FusionOutput SlamPipeline::label(const FrameInput& frame) const {
  if (config_.mode == AblationMode::None) {
    PointCloud all = frame.cloud;
    for (auto& p : all.points) p.label = Label::make_static();
    return split_by_labels(all);
  }
  if (!frame.segmentation) throw DatasetError(frame.frame_id, "no segmentation for this frame");
  const DynamicMaskImage mask =
      dilate(flatten_dynamic(*frame.segmentation, dynamic_classes_, config_.min_confidence),
             config_.dilation_radius);
  if (config_.mode == AblationMode::Vision) {
    return split_by_labels(label_points(frame.cloud, mask, camera_));
  }
  return fuse_frame(frame.cloud, mask, camera_, config_.fusion);
}

const FrameDiagnostics& SlamPipeline::process(const FrameInput& frame) {
  FrameDiagnostics d;
  d.frame_id = frame.frame_id;
  d.timestamp = frame.timestamp;
  d.points = frame.cloud.size();

  auto t0 = Clock::now();
  FusionOutput fused = label(frame);
  d.times.label_ms = ms_since(t0);
  d.dynamic_points = fused.dynamic_points.size();
  last_labels_ = fused.labels;

  const bool have_gt = frame.ground_truth_labels.size() == frame.cloud.size() && !frame.cloud.empty();
  std::vector<std::uint8_t> static_taint;
  if (have_gt) {
    std::size_t gt_dyn = 0, hit = 0, gt_static = 0, fp = 0;
    for (std::size_t i = 0; i < frame.cloud.size(); ++i) {
      const bool truth = Label::from_byte(frame.ground_truth_labels[i]).is_dynamic();
      const bool said = fused.labels[i].is_dynamic();
      if (truth) {
        ++gt_dyn;
        hit += said;
      } else {
        ++gt_static;
        fp += said;
      }
      if (!said) static_taint.push_back(truth ? 1 : 0);
    }
    d.dynamic_recall = gt_dyn ? static_cast<double>(hit) / gt_dyn : 1.0;
    d.static_false_positive = gt_static ? static_cast<double>(fp) / gt_static : 0.0;
  }

  t0 = Clock::now();
  const FeatureSet features = extract_features(fused.static_points, config_.features);
  d.edge_features = features.edges.size();
  d.planar_features = features.planars.size();
  d.times.features_ms = ms_since(t0);

  t0 = Clock::now();
  Pose pose;
  if (!trajectory_.empty()) {
    pose = trajectory_.size() >= 2
               ? predict_constant_velocity(trajectory_[trajectory_.size() - 2].pose,
                                           trajectory_.back().pose)
               : trajectory_.back().pose;
    try {
      const RegistrationResult r = estimate_pose(features, local_map_, pose, config_.registration);
      pose = r.pose;
      d.iterations = r.iterations;
      d.cost = r.final_cost;
      d.edge_inliers = r.edge_inliers;
      d.planar_inliers = r.planar_inliers;
    } catch (const DegenerateRegistration& e) {
      d.error = std::string("degenerate registration: ") + e.what();
    } catch (const SolverFailure& e) {
      d.error = std::string("solver failure: ") + e.what();
    }
  }
  d.times.registration_ms = ms_since(t0);

  t0 = Clock::now();
  local_map_.update(features, pose);
  d.keyframe = !last_keyframe_ || is_keyframe(pose, *last_keyframe_, config_.keyframe);
  if (d.keyframe) last_keyframe_ = pose;
  static_map_.update(fused.static_points, pose, d.keyframe, nullptr, nullptr, static_taint);

  std::vector<int> classes;
  if (frame.segmentation && !fused.dynamic_points.empty()) {
    std::vector<int> class_image(static_cast<std::size_t>(camera_.width) * camera_.height, 0);
    for (const auto& inst : frame.segmentation->instances) {
      const auto& px = inst.bitmap.data();
      for (std::size_t i = 0; i < px.size(); ++i) {
        if (px[i]) class_image[i] = inst.class_id;
      }
    }
    const auto pixel = project_cloud(camera_, fused.dynamic_points);
    for (const auto p : pixel) classes.push_back(p >= 0 ? class_image[static_cast<std::size_t>(p)] : 0);
  }
  dynamic_map_ = update_dynamic_map(fused.dynamic_points, pose, frame.frame_id, classes);
  d.boxes = dynamic_map_.boxes.size();
  d.times.mapping_ms = ms_since(t0);

  trajectory_.push_back({frame.timestamp, pose});
  diagnostics_.push_back(d);
  return diagnostics_.back();
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<FrameDiagnostics>& diagnostics) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "frame,timestamp,points,dynamic_points,edge_features,planar_features,iterations,cost,"
         "edge_inliers,planar_inliers,keyframe,boxes,dynamic_recall,static_false_positive,"
         "label_ms,features_ms,registration_ms,mapping_ms,error\n";
  char buf[512];
  for (const auto& d : diagnostics) {
    std::snprintf(buf, sizeof buf,
                  "%lld,%.6f,%zu,%zu,%zu,%zu,%d,%.9g,%zu,%zu,%d,%zu,%.6f,%.6f,%.3f,%.3f,%.3f,%.3f,",
                  static_cast<long long>(d.frame_id), d.timestamp, d.points, d.dynamic_points,
                  d.edge_features, d.planar_features, d.iterations, d.cost, d.edge_inliers,
                  d.planar_inliers, d.keyframe ? 1 : 0, d.boxes, d.dynamic_recall,
                  d.static_false_positive, d.times.label_ms, d.times.features_ms,
                  d.times.registration_ms, d.times.mapping_ms);
    std::string err = d.error;
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << buf << err << '\n';
  }
}

RunSummary run_dataset(const Dataset& dataset, const PipelineConfig& config,
                       const std::filesystem::path& out_dir) {
  const ClassTable classes = ClassTable::defaults();
  SlamPipeline pipeline(config, dataset.camera(), classes);
  RunSummary summary;
  const bool write = !out_dir.empty();
  if (write) std::filesystem::create_directories(out_dir / "boxes");
  const bool masks = config.mode != AblationMode::None;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    ++summary.frames;
    FrameInput frame;
    try {
      frame = dataset.load(i, masks, classes);
    } catch (const DatasetError& e) {
      summary.failed_frames.push_back(e.frame_id());
      FrameDiagnostics d;
      d.frame_id = e.frame_id();
      d.error = e.what();
      summary.diagnostics.push_back(d);
      continue;
    }
    const FrameDiagnostics& d = pipeline.process(frame);
    if (!d.error.empty()) summary.failed_frames.push_back(d.frame_id);
    summary.diagnostics.push_back(d);
    if (write) {
      char name[32];
      std::snprintf(name, sizeof name, "%06lld.json", static_cast<long long>(frame.frame_id));
      write_boxes_json(out_dir / "boxes" / name, pipeline.dynamic_map());
    }
  }
  summary.trajectory = pipeline.trajectory();
  summary.static_map_points = pipeline.static_map().size();
  summary.static_map_tainted = pipeline.static_map().tainted_count();
  if (write) {
    write_tum(out_dir / "trajectory.txt", summary.trajectory);
    write_diagnostics_csv(out_dir / "diagnostics.csv", summary.diagnostics);
    const PointCloud map = pipeline.static_map().cloud();
    write_mmpc(out_dir / "static_map.mmpc", map);
    write_xyz(out_dir / "static_map.xyz", map);
  }
  return summary;
}

}  // namespace dynslam
