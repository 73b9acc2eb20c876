#include "dynslam/pipeline/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace dynslam {

DriftReport evaluate(const Trajectory& estimate, const Trajectory& ground_truth) {
  if (estimate.empty() || ground_truth.empty()) throw AlignmentError("empty trajectory");
  if (estimate.size() != ground_truth.size()) {
    throw AlignmentError("trajectory lengths differ: " + std::to_string(estimate.size()) +
                         " estimated vs " + std::to_string(ground_truth.size()) + " reference");
  }
  std::vector<double> gaps;
  for (std::size_t i = 1; i < ground_truth.size(); ++i) {
    gaps.push_back(ground_truth[i].timestamp - ground_truth[i - 1].timestamp);
  }
  double tolerance = 1e-6;
  if (!gaps.empty()) {
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    tolerance = std::max(tolerance, 0.5 * gaps[gaps.size() / 2]);
  }

  std::vector<std::size_t> match(estimate.size());
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double t = estimate[i].timestamp;
    const auto it = std::lower_bound(
        ground_truth.begin(), ground_truth.end(), t,
        [](const TimedPose& p, double v) { return p.timestamp < v; });
    std::size_t best = ground_truth.size();
    double best_dt = tolerance;
    for (auto c : {it, it == ground_truth.begin() ? it : it - 1}) {
      if (c == ground_truth.end()) continue;
      const double dt = std::abs(c->timestamp - t);
      if (dt <= best_dt) {
        best_dt = dt;
        best = static_cast<std::size_t>(c - ground_truth.begin());
      }
    }
    if (best == ground_truth.size()) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "no reference pose within %.4f s of t=%.6f", tolerance, t);
      throw AlignmentError(buf);
    }
    match[i] = best;
  }

  const Pose align = ground_truth[match[0]].pose * estimate[0].pose.inverse();
  DriftReport r;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const Vec3 e = (align * estimate[i].pose).translation();
    const double d = 100.0 * (e - ground_truth[match[i]].pose.translation()).norm();
    r.drift_cm.push_back(d);
    r.timestamps.push_back(estimate[i].timestamp);
    r.atde_cm += d;
    r.mtde_cm = std::max(r.mtde_cm, d);
  }
  // A mean of equal values can round above them.
  r.atde_cm = std::min(r.atde_cm / static_cast<double>(estimate.size()), r.mtde_cm);
  return r;
}

void write_drift_csv(const std::filesystem::path& path, const DriftReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "timestamp,drift_cm\n";
  char buf[64];
  for (std::size_t i = 0; i < report.drift_cm.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", report.timestamps[i], report.drift_cm[i]);
    out << buf;
  }
}

}  // namespace dynslam
