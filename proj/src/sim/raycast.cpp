#include "dynslam/sim/raycast.hpp"

#include <cmath>
#include <limits>

namespace dynslam::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinHit = 1e-9;

// Entry distance of a ray into an axis-aligned box from outside.
double box_entry(const Vec3& o, const Vec3& d, const Vec3& lo, const Vec3& hi) {
  double t0 = -kInf, t1 = kInf;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < lo[a] || o[a] > hi[a]) return kInf;
      continue;
    }
    double ta = (lo[a] - o[a]) / d[a];
    double tb = (hi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1 || t0 <= kMinHit) return kInf;
  return t0;
}

double cylinder_entry(const Vec3& o, const Vec3& d, const Vec3& lo, const Vec3& hi) {
  const double cx = 0.5 * (lo.x() + hi.x());
  const double cy = 0.5 * (lo.y() + hi.y());
  const double r = 0.5 * (hi.x() - lo.x());
  double best = kInf;
  const double ox = o.x() - cx, oy = o.y() - cy;
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 0.0) {
    const double b = ox * d.x() + oy * d.y();
    const double c = ox * ox + oy * oy - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double t = (-b - std::sqrt(disc)) / a;
      const double z = o.z() + t * d.z();
      if (t > kMinHit && z >= lo.z() && z <= hi.z()) best = t;
    }
  }
  if (d.z() != 0.0) {
    for (const double zc : {lo.z(), hi.z()}) {
      const double t = (zc - o.z()) / d.z();
      if (t <= kMinHit || t >= best) continue;
      const double x = ox + t * d.x(), y = oy + t * d.y();
      if (x * x + y * y <= r * r) best = t;
    }
  }
  return best;
}

}  // namespace

SceneSnapshot::SceneSnapshot(const SceneConfig& config, double t) {
  const Vec3 half = 0.5 * config.room_size;
  room_min_ = Vec3(-half.x(), -half.y(), 0.0);
  room_max_ = Vec3(half.x(), half.y(), config.room_size.z());
  const Rgb wall_colors[6] = {{210, 200, 180}, {200, 210, 180}, {190, 190, 210},
                              {210, 190, 190}, {110, 100, 90},  {240, 240, 240}};
  for (const Rgb& c : wall_colors) surfaces_.push_back({c, -1});
  for (const Obstacle& o : config.obstacles) {
    solids_.push_back({o.shape, o.center - 0.5 * o.size, o.center + 0.5 * o.size,
                       static_cast<int>(surfaces_.size())});
    surfaces_.push_back({o.color, -1});
  }
  for (std::size_t k = 0; k < config.moving_objects.size(); ++k) {
    const MovingObject& m = config.moving_objects[k];
    const Vec3 c = m.center_at(t);
    solids_.push_back({m.shape, c - 0.5 * m.size, c + 0.5 * m.size,
                       static_cast<int>(surfaces_.size())});
    surfaces_.push_back({m.color, static_cast<int>(k)});
  }
}

std::optional<RayHit> SceneSnapshot::cast(const Vec3& o, const Vec3& d, double max_range) const {
  // Room interior: leave through the nearest face.
  RayHit hit{kInf, -1};
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) continue;
    const bool positive = d[a] > 0.0;
    const double t = ((positive ? room_max_[a] : room_min_[a]) - o[a]) / d[a];
    if (t > kMinHit && t < hit.distance) hit = {t, 2 * a + (positive ? 1 : 0)};
  }
  for (const Solid& s : solids_) {
    const double t =
        s.shape == Shape::Box ? box_entry(o, d, s.min, s.max) : cylinder_entry(o, d, s.min, s.max);
    if (t < hit.distance) hit = {t, s.surface};
  }
  if (hit.surface < 0 || hit.distance > max_range) return std::nullopt;
  return hit;
}

double SceneSnapshot::distance_to_surface(int id, const Vec3& p) const {
  if (id < 6) {
    const int a = id / 2;
    return std::abs(p[a] - (id % 2 ? room_max_[a] : room_min_[a]));
  }
  for (const Solid& s : solids_) {
    if (s.surface != id) continue;
    if (s.shape == Shape::Box) {
      const Vec3 c = 0.5 * (s.min + s.max);
      const Vec3 h = 0.5 * (s.max - s.min);
      const Vec3 q = (p - c).cwiseAbs() - h;
      const double outside = q.cwiseMax(0.0).norm();
      const double inside = std::min(q.maxCoeff(), 0.0);
      return std::abs(outside + inside);
    }
    const Vec3 c = 0.5 * (s.min + s.max);
    const double r = 0.5 * (s.max.x() - s.min.x());
    const double h = 0.5 * (s.max.z() - s.min.z());
    const double dr = std::hypot(p.x() - c.x(), p.y() - c.y()) - r;
    const double dz = std::abs(p.z() - c.z()) - h;
    const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
    return std::abs(outside + std::min(std::max(dr, dz), 0.0));
  }
  return kInf;
}

}  // namespace dynslam::sim
