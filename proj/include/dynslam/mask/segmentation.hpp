#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynslam/mask/binary_image.hpp"

namespace dynslam {

/// Bidirectional class-name <-> class-id registry.
class ClassTable {
 public:
  ClassTable() = default;

  /// person=1, agv=2, forklift=3, box=4, chair=5, table=6.
  static ClassTable defaults();

  void add(const std::string& name, int id);
  std::optional<int> id_of(const std::string& name) const;
  std::optional<std::string> name_of(int id) const;
  bool contains(int id) const { return by_id_.count(id) != 0; }
  const std::map<std::string, int>& by_name() const { return by_name_; }

  /// Resolves names to ids; throws std::invalid_argument on unknown names.
  std::set<int> ids_of(const std::vector<std::string>& names) const;

 private:
  std::map<std::string, int> by_name_;
  std::map<int, std::string> by_id_;
};

struct InstanceMask {
  int id = 0;  // pixel value in the label image, >= 1
  int class_id = 0;
  std::string class_name;
  double confidence = 1.0;
  BinaryImage bitmap;
  PixelRect bbox;
};

struct SegmentationResult {
  std::int64_t frame_id = 0;
  int width = 0;
  int height = 0;
  std::vector<InstanceMask> instances;
};

class SegmentationError : public std::runtime_error {
 public:
  SegmentationError(std::int64_t frame_id, std::optional<int> instance_id,
                    const std::string& what);

  std::int64_t frame_id() const { return frame_id_; }
  std::optional<int> instance_id() const { return instance_id_; }

 private:
  std::int64_t frame_id_;
  std::optional<int> instance_id_;
};

// On-disk layout per frame: <stem>.png holds a 16-bit grayscale label image
// (0 = background, k = instance with id k) and <stem>.json the metadata
//   {frame_id, width, height,
//    instances: [{id, class_name, class_id, confidence, bbox: [x, y, w, h]}]}.

/// `path` may name the .json, the .png or the bare stem.
SegmentationResult load_segmentation(const std::filesystem::path& path, const ClassTable& classes);

/// Instances must not overlap (the label image stores one id per pixel).
void save_segmentation(const std::filesystem::path& stem, const SegmentationResult& seg);

/// Union of instance bitmaps whose class is in `dynamic_classes` and whose
/// confidence is >= min_confidence.
DynamicMaskImage flatten_dynamic(const SegmentationResult& seg, const std::set<int>& dynamic_classes,
                                 double min_confidence = 0.0);

/// Checks instance sizes and tight bounding boxes; throws SegmentationError.
void validate(const SegmentationResult& seg);

}  // namespace dynslam
