#include <cmath>

#include "dynslam/simd/kernels.hpp"

namespace dynslam::simd {

namespace {

void squared_distances_scalar(const double* xs, const double* ys, const double* zs,
                              std::size_t n, double qx, double qy, double qz, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    out[i] = (dx * dx + dy * dy) + dz * dz;
  }
}

RangeStats range_stats_scalar(const double* xs, const double* ys, const double* zs,
                              const double* norms, std::size_t n, double qx, double qy,
                              double qz, double r2) {
  // Four interleaved partial sums, combined pairwise, then the tail in order:
  // the summation order of the vector kernels.
  RangeStats stats;
  double lanes[4] = {0.0, 0.0, 0.0, 0.0};
  const auto inside = [&](std::size_t i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    return (dx * dx + dy * dy) + dz * dz <= r2;
  };
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      if (inside(i + l)) {
        ++stats.count;
        lanes[l] += norms[i + l];
      }
    }
  }
  stats.norm_sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    if (inside(i)) {
      ++stats.count;
      stats.norm_sum += norms[i];
    }
  }
  return stats;
}

void or_into_scalar(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] |= src[i];
}

void project_points_scalar(const double* xs, const double* ys, const double* zs, std::size_t n,
                           const ProjectionParams& p, std::int32_t* pixel) {
  const double* r = p.rotation;
  const double w = p.width;
  const double h = p.height;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i], y = ys[i], z = zs[i];
    const double qx = ((r[0] * x + r[1] * y) + r[2] * z) + p.translation[0];
    const double qy = ((r[3] * x + r[4] * y) + r[5] * z) + p.translation[1];
    const double qz = ((r[6] * x + r[7] * y) + r[8] * z) + p.translation[2];
    const double u = (p.fx * qx) / qz + p.cx;
    const double v = (p.fy * qy) / qz + p.cy;
    const bool valid = qz > 0.0 && u >= 0.0 && u < w && v >= 0.0 && v < h;
    pixel[i] = valid ? static_cast<std::int32_t>(std::floor(v) * w + std::floor(u)) : -1;
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{Isa::Scalar, &squared_distances_scalar, &range_stats_scalar,
                             &or_into_scalar, &project_points_scalar};
  return table;
}

}  // namespace dynslam::simd
