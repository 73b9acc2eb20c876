#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "dynslam/core/trajectory.hpp"

namespace dynslam {

class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DriftReport {
  double atde_cm = 0.0;  // mean per-frame drift
  double mtde_cm = 0.0;  // max per-frame drift
  std::vector<double> drift_cm;
  std::vector<double> timestamps;
};

/// Pairs each estimated pose with the ground-truth pose nearest in time
/// (within half the median ground-truth frame period), aligns the estimate
/// by A = gt_0 * est_0^-1 and reports |t(A * est_k) - t(gt_k)|.
/// Throws AlignmentError when the lengths differ or a timestamp has no match.
DriftReport evaluate(const Trajectory& estimate, const Trajectory& ground_truth);

void write_drift_csv(const std::filesystem::path& path, const DriftReport& report);

}  // namespace dynslam
