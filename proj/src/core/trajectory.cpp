#include "dynslam/core/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace dynslam {

Trajectory read_tum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TrajectoryIoError("cannot open trajectory: " + path.string());
  Trajectory out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double v[8];
    for (double& x : v) {
      if (!(ss >> x)) {
        throw TrajectoryIoError(path.string() + ":" + std::to_string(line_no) +
                                ": expected 8 numbers");
      }
    }
    const Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
    if (!(q.norm() > 0.0)) {
      throw TrajectoryIoError(path.string() + ":" + std::to_string(line_no) + ": zero quaternion");
    }
    out.push_back({v[0], Pose(q, Vec3(v[1], v[2], v[3]))});
  }
  return out;
}

void write_tum(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw TrajectoryIoError("cannot write trajectory: " + path.string());
  char buf[256];
  for (const auto& tp : trajectory) {
    const Vec3& t = tp.pose.translation();
    const auto& q = tp.pose.rotation();
    std::snprintf(buf, sizeof buf, "%.6f %.9f %.9f %.9f %.9f %.9f %.9f %.9f\n", tp.timestamp,
                  t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
    out << buf;
  }
}

}  // namespace dynslam
