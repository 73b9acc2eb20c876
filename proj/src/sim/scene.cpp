#include "dynslam/sim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

namespace dynslam::sim {

namespace {

double deg(double d) { return d * std::numbers::pi / 180.0; }

// Position along a polyline after travelling `s` meters, bouncing at the ends.
Vec3 along_pingpong(const std::vector<Vec3>& path, double s) {
  if (path.size() == 1) return path.front();
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += (path[i] - path[i - 1]).norm();
  if (total <= 0.0) return path.front();
  double u = std::fmod(s, 2.0 * total);
  if (u < 0.0) u += 2.0 * total;
  if (u > total) u = 2.0 * total - u;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double len = (path[i] - path[i - 1]).norm();
    if (u <= len || i + 1 == path.size()) {
      const double f = len > 0.0 ? std::min(u / len, 1.0) : 0.0;
      return path[i - 1] + f * (path[i] - path[i - 1]);
    }
    u -= len;
  }
  return path.back();
}

}  // namespace

Vec3 MovingObject::center_at(double t) const {
  Vec3 c = along_pingpong(path, start_offset + speed * t);
  c.z() = z_min + 0.5 * size.z();
  return c;
}

bool MaskDegradation::is_identity() const {
  return erosion_radius == 0 && truncation == 0.0 && dropout == 0.0 && misclassification == 0.0;
}

void MaskDegradation::validate() const {
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (erosion_radius < 0) throw std::invalid_argument("degradation: erosion radius < 0");
  if (!unit(truncation) || !unit(dropout) || !unit(misclassification)) {
    throw std::invalid_argument("degradation: fractions and probabilities must be in [0, 1]");
  }
}

void SceneConfig::validate() const {
  if (!(room_size.array() > 0.0).all()) throw std::invalid_argument("scene: empty room");
  if (sensor.points_per_scan == 0) throw std::invalid_argument("scene: zero points per scan");
  if (!(sensor.fov_horizontal_deg > 0.0 && sensor.fov_horizontal_deg < 180.0) ||
      !(sensor.fov_vertical_deg > 0.0 && sensor.fov_vertical_deg < 180.0)) {
    throw std::invalid_argument("scene: field of view must be in (0, 180) degrees");
  }
  if (!(sensor.range_noise >= 0.0)) throw std::invalid_argument("scene: negative range noise");
  if (!(sensor.max_range > 0.0)) throw std::invalid_argument("scene: max range must be > 0");
  if (!(frame_rate > 0.0)) throw std::invalid_argument("scene: frame rate must be > 0");
  if (frames == 0) throw std::invalid_argument("scene: zero frames");
  if (trajectory.waypoints.empty()) throw std::invalid_argument("scene: no sensor waypoints");
  if (trajectory.waypoints.size() > 1 && !(trajectory.speed > 0.0)) {
    throw std::invalid_argument("scene: sensor speed must be > 0");
  }
  const Vec3 half = 0.5 * room_size;
  for (const auto& w : trajectory.waypoints) {
    const Vec3 p = w.position;
    if (std::abs(p.x()) >= half.x() || std::abs(p.y()) >= half.y() || p.z() <= 0.0 ||
        p.z() >= room_size.z()) {
      throw std::invalid_argument("scene: sensor waypoint outside the room");
    }
  }
  for (const auto& o : obstacles) {
    if (!(o.size.array() > 0.0).all()) throw std::invalid_argument("scene: empty obstacle");
  }
  for (const auto& m : moving_objects) {
    if (m.path.empty()) throw std::invalid_argument("scene: moving object '" + m.name + "' has no path");
    if (!(m.size.array() > 0.0).all()) throw std::invalid_argument("scene: empty moving object");
    if (m.speed < 0.0) throw std::invalid_argument("scene: negative object speed");
  }
  camera.validate();
  degradation.validate();
}

CameraModel default_camera() {
  CameraModel cam;
  cam.width = 320;
  cam.height = 240;
  cam.fx = 180.0;
  cam.fy = 180.0;
  cam.cx = 160.0;
  cam.cy = 120.0;
  cam.extrinsic = forward_looking_extrinsic();
  return cam;
}

SceneConfig default_scene() {
  SceneConfig s;
  s.obstacles = {
      {Shape::Box, {2.0, -1.8, 0.4}, {1.0, 1.0, 0.8}, {150, 110, 60}},
      {Shape::Cylinder, {2.5, 1.8, 1.5}, {0.4, 0.4, 3.0}, {180, 180, 180}},
      {Shape::Box, {3.6, 0.3, 1.0}, {0.6, 1.2, 2.0}, {90, 90, 140}},
  };
  MovingObject walker;
  walker.name = "walker";
  walker.path = {{0.5, -2.2, 0.0}, {0.5, 2.2, 0.0}};
  s.moving_objects.push_back(walker);
  s.camera = default_camera();
  s.trajectory.waypoints = {{{-3.0, 0.0, 1.0}, 0.0}};
  return s;
}

Pose sensor_pose_at(const TrajectoryConfig& trajectory, double t) {
  const auto& w = trajectory.waypoints;
  const auto pose_of = [](const Vec3& p, double yaw_deg) {
    return Pose::from_axis_angle(Vec3::UnitZ(), deg(yaw_deg), p);
  };
  if (w.size() == 1) return pose_of(w[0].position, w[0].yaw_deg);
  double s = trajectory.speed * t;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double len = (w[i].position - w[i - 1].position).norm();
    if (s <= len) {
      const double f = len > 0.0 ? s / len : 1.0;
      return pose_of(w[i - 1].position + f * (w[i].position - w[i - 1].position),
                     w[i - 1].yaw_deg + f * (w[i].yaw_deg - w[i - 1].yaw_deg));
    }
    s -= len;
  }
  return pose_of(w.back().position, w.back().yaw_deg);
}

// ---- YAML ----

namespace {

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!node.IsMap()) throw std::invalid_argument(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
}

Vec3 vec3(const YAML::Node& n, const std::string& where, double z_default = 0.0) {
  if (!n.IsSequence() || (n.size() != 3 && n.size() != 2)) {
    throw std::invalid_argument(where + ": expected [x, y] or [x, y, z]");
  }
  return {n[0].as<double>(), n[1].as<double>(), n.size() == 3 ? n[2].as<double>() : z_default};
}

Rgb rgb(const YAML::Node& n, const std::string& where) {
  if (!n.IsSequence() || n.size() != 3) throw std::invalid_argument(where + ": expected [r, g, b]");
  return {static_cast<std::uint8_t>(n[0].as<int>()), static_cast<std::uint8_t>(n[1].as<int>()),
          static_cast<std::uint8_t>(n[2].as<int>())};
}

Shape shape(const YAML::Node& n, const std::string& where) {
  const auto s = n.as<std::string>();
  if (s == "box") return Shape::Box;
  if (s == "cylinder") return Shape::Cylinder;
  throw std::invalid_argument(where + ": unknown shape '" + s + "'");
}

template <class T>
void opt(const YAML::Node& node, const char* key, T& out) {
  if (node[key]) out = node[key].as<T>();
}

}  // namespace

SceneConfig load_scene_config(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument("scene " + path.string() + ": " + e.what());
  }
  SceneConfig s = default_scene();
  try {
    check_keys(root, {"room", "obstacles", "moving_objects", "sensor", "camera", "trajectory",
                      "frame_rate", "frames", "seed", "degradation"},
               "scene");
    if (root["room"]) s.room_size = vec3(root["room"], "room");
    if (root["obstacles"]) {
      s.obstacles.clear();
      for (const auto& o : root["obstacles"]) {
        check_keys(o, {"shape", "center", "size", "color"}, "obstacle");
        Obstacle ob;
        ob.shape = shape(o["shape"], "obstacle");
        ob.center = vec3(o["center"], "obstacle.center");
        ob.size = vec3(o["size"], "obstacle.size");
        if (o["color"]) ob.color = rgb(o["color"], "obstacle.color");
        s.obstacles.push_back(ob);
      }
    }
    if (root["moving_objects"]) {
      s.moving_objects.clear();
      for (const auto& o : root["moving_objects"]) {
        check_keys(o, {"name", "shape", "size", "z_min", "path", "speed", "start_offset", "class",
                       "color"},
                   "moving object");
        MovingObject m;
        opt(o, "name", m.name);
        if (o["shape"]) m.shape = shape(o["shape"], "moving object");
        if (o["size"]) m.size = vec3(o["size"], "moving object.size");
        opt(o, "z_min", m.z_min);
        opt(o, "speed", m.speed);
        opt(o, "start_offset", m.start_offset);
        opt(o, "class", m.class_name);
        if (o["color"]) m.color = rgb(o["color"], "moving object.color");
        for (const auto& p : o["path"]) m.path.push_back(vec3(p, "moving object.path"));
        s.moving_objects.push_back(m);
      }
    }
    if (const auto n = root["sensor"]) {
      check_keys(n, {"points_per_scan", "fov_horizontal_deg", "fov_vertical_deg", "range_noise",
                     "max_range"},
                 "sensor");
      opt(n, "points_per_scan", s.sensor.points_per_scan);
      opt(n, "fov_horizontal_deg", s.sensor.fov_horizontal_deg);
      opt(n, "fov_vertical_deg", s.sensor.fov_vertical_deg);
      opt(n, "range_noise", s.sensor.range_noise);
      opt(n, "max_range", s.sensor.max_range);
    }
    if (const auto n = root["camera"]) {
      check_keys(n, {"width", "height", "fx", "fy", "cx", "cy", "offset"}, "camera");
      opt(n, "width", s.camera.width);
      opt(n, "height", s.camera.height);
      opt(n, "fx", s.camera.fx);
      opt(n, "fy", s.camera.fy);
      opt(n, "cx", s.camera.cx);
      opt(n, "cy", s.camera.cy);
      if (n["offset"]) s.camera.extrinsic = forward_looking_extrinsic(vec3(n["offset"], "camera.offset"));
    }
    if (const auto n = root["trajectory"]) {
      check_keys(n, {"waypoints", "speed"}, "trajectory");
      opt(n, "speed", s.trajectory.speed);
      if (n["waypoints"]) {
        s.trajectory.waypoints.clear();
        for (const auto& w : n["waypoints"]) {
          check_keys(w, {"position", "yaw_deg"}, "waypoint");
          SensorWaypoint sw;
          sw.position = vec3(w["position"], "waypoint.position");
          opt(w, "yaw_deg", sw.yaw_deg);
          s.trajectory.waypoints.push_back(sw);
        }
      }
    }
    opt(root, "frame_rate", s.frame_rate);
    opt(root, "frames", s.frames);
    opt(root, "seed", s.seed);
    if (const auto n = root["degradation"]) {
      check_keys(n, {"erosion_radius", "truncation", "dropout", "misclassification",
                     "misclassified_as"},
                 "degradation");
      opt(n, "erosion_radius", s.degradation.erosion_radius);
      opt(n, "truncation", s.degradation.truncation);
      opt(n, "dropout", s.degradation.dropout);
      opt(n, "misclassification", s.degradation.misclassification);
      opt(n, "misclassified_as", s.degradation.misclassified_as);
    }
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument("scene " + path.string() + ": " + e.what());
  }
  s.validate();
  return s;
}

}  // namespace dynslam::sim
