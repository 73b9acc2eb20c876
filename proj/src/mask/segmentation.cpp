#include "dynslam/mask/segmentation.hpp"

#include <fstream>
#include <map>

#include "json.hpp"
#include "png16.hpp"

namespace dynslam {

using nlohmann::json;

ClassTable ClassTable::defaults() {
  ClassTable t;
  t.add("person", 1);
  t.add("agv", 2);
  t.add("forklift", 3);
  t.add("box", 4);
  t.add("chair", 5);
  t.add("table", 6);
  return t;
}

void ClassTable::add(const std::string& name, int id) {
  if (name.empty()) throw std::invalid_argument("class name must not be empty");
  if (by_name_.count(name) || by_id_.count(id)) {
    throw std::invalid_argument("duplicate class entry: " + name + "=" + std::to_string(id));
  }
  by_name_[name] = id;
  by_id_[id] = name;
}

std::optional<int> ClassTable::id_of(const std::string& name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> ClassTable::name_of(int id) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::set<int> ClassTable::ids_of(const std::vector<std::string>& names) const {
  std::set<int> ids;
  for (const auto& n : names) {
    const auto id = id_of(n);
    if (!id) throw std::invalid_argument("unknown class name: " + n);
    ids.insert(*id);
  }
  return ids;
}

SegmentationError::SegmentationError(std::int64_t frame_id, std::optional<int> instance_id,
                                     const std::string& what)
    : std::runtime_error("frame " + std::to_string(frame_id) +
                         (instance_id ? ", instance " + std::to_string(*instance_id) : "") + ": " +
                         what),
      frame_id_(frame_id),
      instance_id_(instance_id) {}

namespace {

std::filesystem::path with_ext(std::filesystem::path p, const char* ext) {
  if (p.extension() == ".json" || p.extension() == ".png") p.replace_extension();
  p += ext;
  return p;
}

template <class T>
T field(const json& obj, const char* key, std::int64_t frame, std::optional<int> inst) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SegmentationError(frame, inst, std::string("missing field '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw SegmentationError(frame, inst, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

void validate(const SegmentationResult& seg) {
  std::set<int> ids;
  for (const auto& inst : seg.instances) {
    if (inst.bitmap.width() != seg.width || inst.bitmap.height() != seg.height) {
      throw SegmentationError(seg.frame_id, inst.id, "bitmap size differs from frame size");
    }
    if (!ids.insert(inst.id).second) {
      throw SegmentationError(seg.frame_id, inst.id, "duplicate instance id");
    }
    if (!(inst.confidence >= 0.0 && inst.confidence <= 1.0)) {
      throw SegmentationError(seg.frame_id, inst.id, "confidence outside [0, 1]");
    }
    if (inst.bbox != inst.bitmap.bounding_box()) {
      throw SegmentationError(seg.frame_id, inst.id, "bbox is not the tight box of the mask");
    }
  }
}

SegmentationResult load_segmentation(const std::filesystem::path& path, const ClassTable& classes) {
  const auto json_path = with_ext(path, ".json");
  const auto png_path = with_ext(path, ".png");

  std::ifstream in(json_path);
  if (!in) throw SegmentationError(-1, std::nullopt, "cannot open " + json_path.string());
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::exception& e) {
    throw SegmentationError(-1, std::nullopt, "malformed JSON in " + json_path.string());
  }

  SegmentationResult seg;
  seg.frame_id = field<std::int64_t>(meta, "frame_id", -1, std::nullopt);
  seg.width = field<int>(meta, "width", seg.frame_id, std::nullopt);
  seg.height = field<int>(meta, "height", seg.frame_id, std::nullopt);
  if (seg.width <= 0 || seg.height <= 0) {
    throw SegmentationError(seg.frame_id, std::nullopt, "non-positive image size");
  }
  const auto instances = field<json>(meta, "instances", seg.frame_id, std::nullopt);
  if (!instances.is_array()) {
    throw SegmentationError(seg.frame_id, std::nullopt, "'instances' must be an array");
  }

  detail::Gray16Image labels;
  try {
    labels = detail::read_gray_png(png_path);
  } catch (const std::exception& e) {
    throw SegmentationError(seg.frame_id, std::nullopt, e.what());
  }
  if (labels.width != seg.width || labels.height != seg.height) {
    throw SegmentationError(seg.frame_id, std::nullopt,
                            "mask image is " + std::to_string(labels.width) + "x" +
                                std::to_string(labels.height) + ", metadata says " +
                                std::to_string(seg.width) + "x" + std::to_string(seg.height));
  }

  std::map<int, std::size_t> slot_of_id;
  for (const auto& item : instances) {
    InstanceMask inst;
    inst.id = field<int>(item, "id", seg.frame_id, std::nullopt);
    if (inst.id < 1 || inst.id > 65535) {
      throw SegmentationError(seg.frame_id, inst.id, "instance id must be in [1, 65535]");
    }
    inst.class_id = field<int>(item, "class_id", seg.frame_id, inst.id);
    inst.class_name = field<std::string>(item, "class_name", seg.frame_id, inst.id);
    inst.confidence = field<double>(item, "confidence", seg.frame_id, inst.id);
    const auto known = classes.name_of(inst.class_id);
    if (!known) {
      throw SegmentationError(seg.frame_id, inst.id,
                              "unknown class id " + std::to_string(inst.class_id));
    }
    if (*known != inst.class_name) {
      throw SegmentationError(seg.frame_id, inst.id,
                              "class name '" + inst.class_name + "' does not match class id " +
                                  std::to_string(inst.class_id) + " ('" + *known + "')");
    }
    const auto bbox = field<std::vector<int>>(item, "bbox", seg.frame_id, inst.id);
    if (bbox.size() != 4) {
      throw SegmentationError(seg.frame_id, inst.id, "bbox must be [x, y, w, h]");
    }
    inst.bbox = PixelRect{bbox[0], bbox[1], bbox[2], bbox[3]};
    inst.bitmap = BinaryImage(seg.width, seg.height);
    if (!slot_of_id.emplace(inst.id, seg.instances.size()).second) {
      throw SegmentationError(seg.frame_id, inst.id, "duplicate instance id");
    }
    seg.instances.push_back(std::move(inst));
  }

  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      const int v = labels.pixels[static_cast<std::size_t>(y) * seg.width + x];
      if (v == 0) continue;
      const auto it = slot_of_id.find(v);
      if (it == slot_of_id.end()) {
        throw SegmentationError(seg.frame_id, v, "mask pixel references an undeclared instance");
      }
      seg.instances[it->second].bitmap.set(x, y);
    }
  }
  validate(seg);
  return seg;
}

void save_segmentation(const std::filesystem::path& stem, const SegmentationResult& seg) {
  validate(seg);
  detail::Gray16Image labels;
  labels.width = seg.width;
  labels.height = seg.height;
  labels.pixels.assign(static_cast<std::size_t>(seg.width) * seg.height, 0);

  json instances = json::array();
  for (const auto& inst : seg.instances) {
    const auto& px = inst.bitmap.data();
    for (std::size_t i = 0; i < px.size(); ++i) {
      if (!px[i]) continue;
      if (labels.pixels[i] != 0) {
        throw SegmentationError(seg.frame_id, inst.id, "instances overlap");
      }
      labels.pixels[i] = static_cast<std::uint16_t>(inst.id);
    }
    instances.push_back({{"id", inst.id},
                         {"class_name", inst.class_name},
                         {"class_id", inst.class_id},
                         {"confidence", inst.confidence},
                         {"bbox", {inst.bbox.x, inst.bbox.y, inst.bbox.width, inst.bbox.height}}});
  }
  const json meta = {{"frame_id", seg.frame_id},
                     {"width", seg.width},
                     {"height", seg.height},
                     {"instances", instances}};

  detail::write_gray16_png(with_ext(stem, ".png"), labels);
  std::ofstream out(with_ext(stem, ".json"));
  if (!out) throw std::runtime_error("cannot write " + with_ext(stem, ".json").string());
  out << meta.dump(1) << '\n';
}

DynamicMaskImage flatten_dynamic(const SegmentationResult& seg, const std::set<int>& dynamic_classes,
                                 double min_confidence) {
  DynamicMaskImage out(seg.width, seg.height);
  for (const auto& inst : seg.instances) {
    if (!dynamic_classes.count(inst.class_id) || inst.confidence < min_confidence) continue;
    if (!inst.bitmap.same_size(out)) {
      throw SegmentationError(seg.frame_id, inst.id, "bitmap size differs from frame size");
    }
    const auto& src = inst.bitmap.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] |= src[i];
  }
  return out;
}

}  // namespace dynslam
