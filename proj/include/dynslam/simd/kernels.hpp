#pragma once

// Data-parallel inner loops shared by the spatial index, smoothness, mask
// morphology and camera projection. Every kernel has a scalar reference
// implementation; an AVX2 variant is selected at runtime when the CPU
// supports it. Set DYNSLAM_SIMD=scalar in the environment to force the
// reference path.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace dynslam::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct RangeStats {
  std::size_t count = 0;
  double norm_sum = 0.0;
};

/// Rigid transform + pinhole intrinsics, flattened for the projection kernel.
struct ProjectionParams {
  double rotation[9];     // row-major
  double translation[3];
  double fx, fy, cx, cy;
  int width, height;
};

struct Kernels {
  Isa isa;

  /// out[i] = |p_i - q|^2, evaluated as (dx*dx + dy*dy) + dz*dz.
  void (*squared_distances)(const double* xs, const double* ys, const double* zs, std::size_t n,
                            double qx, double qy, double qz, double* out);

  /// Count of points with |p_i - q|^2 <= r2 and the sum of their norms[i].
  /// Full groups of four accumulate into lane i % 4, lanes combine as
  /// (l0 + l1) + (l2 + l3), and the remainder is added in order.
  RangeStats (*range_stats)(const double* xs, const double* ys, const double* zs,
                            const double* norms, std::size_t n, double qx, double qy, double qz,
                            double r2);

  /// dst[i] |= src[i].
  void (*or_into)(std::uint8_t* dst, const std::uint8_t* src, std::size_t n);

  /// Linear pixel index (v * width + u) of each projected point, -1 when the
  /// point is behind the camera or outside the image.
  void (*project_points)(const double* xs, const double* ys, const double* zs, std::size_t n,
                         const ProjectionParams& params, std::int32_t* pixel);
};

const Kernels& scalar_kernels();

/// Null when the build target has no AVX2 variant.
const Kernels* avx2_kernels();

bool cpu_supports(Isa isa);

/// Active kernel table. Chosen once from CPU features and DYNSLAM_SIMD.
const Kernels& kernels();

/// Overrides the active table; throws std::invalid_argument if unsupported.
void set_active_isa(Isa isa);

}  // namespace dynslam::simd
