#include "dynslam/mapping/dynamic_map.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace dynslam {

bool DynamicObjectBox::contains(const Vec3& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

DynamicMap update_dynamic_map(const PointCloud& dynamic_points, const Pose& pose,
                              std::int64_t frame_id, std::span<const int> class_ids) {
  if (!class_ids.empty() && class_ids.size() != dynamic_points.size()) {
    throw std::invalid_argument("dynamic map: class ids do not match the cloud");
  }
  DynamicMap out;
  out.frame_id = frame_id;
  out.points = transform_cloud(pose, dynamic_points);

  std::map<std::uint16_t, std::size_t> slot_of;
  std::vector<std::map<int, std::size_t>> votes;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    const Point& p = out.points[i];
    const auto [it, fresh] = slot_of.try_emplace(p.label.instance, out.boxes.size());
    if (fresh) {
      DynamicObjectBox b;
      b.min = b.max = p.position;
      b.frame_id = frame_id;
      b.instance = p.label.instance;
      out.boxes.push_back(b);
      votes.emplace_back();
    }
    DynamicObjectBox& b = out.boxes[it->second];
    b.min = b.min.cwiseMin(p.position);
    b.max = b.max.cwiseMax(p.position);
    ++b.point_count;
    if (!class_ids.empty()) ++votes[it->second][class_ids[i]];
  }
  for (std::size_t b = 0; b < out.boxes.size(); ++b) {
    std::size_t best = 0;
    for (const auto& [cls, n] : votes[b]) {
      if (n > best) {
        best = n;
        out.boxes[b].class_id = cls;
      }
    }
  }
  return out;
}

void write_boxes_json(const std::filesystem::path& path, const DynamicMap& map) {
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto& b : map.boxes) {
    boxes.push_back({{"instance", b.instance},
                     {"class_id", b.class_id},
                     {"points", b.point_count},
                     {"min", {b.min.x(), b.min.y(), b.min.z()}},
                     {"max", {b.max.x(), b.max.y(), b.max.z()}}});
  }
  const nlohmann::json j = {{"frame_id", map.frame_id}, {"boxes", boxes}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

}  // namespace dynslam
