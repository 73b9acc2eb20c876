#include "dynslam/pipeline/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "dynslam/core/cloud_io.hpp"

namespace dynslam {

namespace fs = std::filesystem;

namespace {

std::string stem_of(std::int64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(id));
  return buf;
}

}  // namespace

DatasetError::DatasetError(std::int64_t frame_id, const std::string& what)
    : std::runtime_error("frame " + std::to_string(frame_id) + ": " + what), frame_id_(frame_id) {}

Dataset::Dataset(const fs::path& dir, double fallback_frame_rate)
    : dir_(dir), frame_rate_(fallback_frame_rate) {
  if (!fs::is_directory(dir / "frames")) {
    throw std::runtime_error("dataset " + dir.string() + ": missing frames/ directory");
  }
  if (!fs::exists(dir / "calib.json")) {
    throw std::runtime_error("dataset " + dir.string() + ": missing calib.json");
  }
  camera_ = load_calibration(dir / "calib.json");
  for (const auto& e : fs::directory_iterator(dir / "frames")) {
    if (e.path().extension() != ".mmpc") continue;
    const std::string s = e.path().stem().string();
    try {
      std::size_t used = 0;
      const long long id = std::stoll(s, &used);
      if (used == s.size()) frame_ids_.push_back(id);
    } catch (const std::exception&) {
      // not a frame file
    }
  }
  std::sort(frame_ids_.begin(), frame_ids_.end());
  if (frame_ids_.empty()) throw std::runtime_error("dataset " + dir.string() + ": no frames");
  if (fs::exists(dir / "groundtruth.txt")) ground_truth_ = read_tum(dir / "groundtruth.txt");
}

FrameInput Dataset::load(std::size_t index, bool with_masks, const ClassTable& classes) const {
  const std::int64_t id = frame_ids_.at(index);
  const std::string stem = stem_of(id);
  FrameInput f;
  f.frame_id = id;
  try {
    f.cloud = read_mmpc(dir_ / "frames" / (stem + ".mmpc"));
  } catch (const std::exception& e) {
    throw DatasetError(id, e.what());
  }
  // Labels stored in frame files are not trusted as input.
  for (auto& p : f.cloud.points) p.label = Label{};
  f.cloud.frame_id = id;
  if (ground_truth_ && index < ground_truth_->size()) {
    f.timestamp = (*ground_truth_)[index].timestamp;
  } else {
    f.timestamp = static_cast<double>(id) / frame_rate_;
  }
  f.cloud.timestamp = f.timestamp;

  if (with_masks) {
    const fs::path mask = dir_ / "masks" / stem;
    if (!fs::exists(fs::path(mask).replace_extension(".json"))) {
      throw DatasetError(id, "missing mask " + mask.string() + ".json");
    }
    try {
      f.segmentation = load_segmentation(mask, classes);
    } catch (const SegmentationError& e) {
      throw DatasetError(id, e.what());
    } catch (const std::exception& e) {
      throw DatasetError(id, e.what());
    }
    if (f.segmentation->width != camera_.width || f.segmentation->height != camera_.height) {
      throw DatasetError(id, "mask size differs from calibration");
    }
  }

  const fs::path labels = dir_ / "labels" / (stem + ".bin");
  if (fs::exists(labels)) {
    std::ifstream in(labels, std::ios::binary);
    f.ground_truth_labels.assign(std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>());
    if (f.ground_truth_labels.size() != f.cloud.size()) {
      throw DatasetError(id, "label file has " + std::to_string(f.ground_truth_labels.size()) +
                                 " entries for " + std::to_string(f.cloud.size()) + " points");
    }
  }
  return f;
}

}  // namespace dynslam
