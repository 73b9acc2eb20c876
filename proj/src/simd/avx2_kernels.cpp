#include "dynslam/simd/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define DYNSLAM_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace dynslam::simd {

#if defined(DYNSLAM_HAVE_AVX2_KERNELS)

namespace {

#define DYNSLAM_AVX2 __attribute__((target("avx2")))

DYNSLAM_AVX2 void squared_distances_avx2(const double* xs, const double* ys, const double* zs,
                                         std::size_t n, double qx, double qy, double qz,
                                         double* out) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  const __m256d vqz = _mm256_set1_pd(qz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vqz);
    const __m256d d2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                     _mm256_mul_pd(dz, dz));
    _mm256_storeu_pd(out + i, d2);
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    out[i] = (dx * dx + dy * dy) + dz * dz;
  }
}

DYNSLAM_AVX2 RangeStats range_stats_avx2(const double* xs, const double* ys, const double* zs,
                                         const double* norms, std::size_t n, double qx,
                                         double qy, double qz, double r2) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  const __m256d vqz = _mm256_set1_pd(qz);
  const __m256d vr2 = _mm256_set1_pd(r2);
  __m256d sum = _mm256_setzero_pd();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vqz);
    const __m256d d2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                     _mm256_mul_pd(dz, dz));
    const __m256d inside = _mm256_cmp_pd(d2, vr2, _CMP_LE_OQ);
    count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(inside)));
    sum = _mm256_add_pd(sum, _mm256_and_pd(inside, _mm256_loadu_pd(norms + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, sum);
  RangeStats stats{count, (lanes[0] + lanes[1]) + (lanes[2] + lanes[3])};
  for (; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    if ((dx * dx + dy * dy) + dz * dz <= r2) {
      ++stats.count;
      stats.norm_sum += norms[i];
    }
  }
  return stats;
}

DYNSLAM_AVX2 void or_into_avx2(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_or_si256(a, b));
  }
  for (; i < n; ++i) dst[i] |= src[i];
}

DYNSLAM_AVX2 void project_points_avx2(const double* xs, const double* ys, const double* zs,
                                      std::size_t n, const ProjectionParams& p,
                                      std::int32_t* pixel) {
  const double* r = p.rotation;
  const __m256d r0 = _mm256_set1_pd(r[0]), r1 = _mm256_set1_pd(r[1]), r2 = _mm256_set1_pd(r[2]);
  const __m256d r3 = _mm256_set1_pd(r[3]), r4 = _mm256_set1_pd(r[4]), r5 = _mm256_set1_pd(r[5]);
  const __m256d r6 = _mm256_set1_pd(r[6]), r7 = _mm256_set1_pd(r[7]), r8 = _mm256_set1_pd(r[8]);
  const __m256d tx = _mm256_set1_pd(p.translation[0]);
  const __m256d ty = _mm256_set1_pd(p.translation[1]);
  const __m256d tz = _mm256_set1_pd(p.translation[2]);
  const __m256d fx = _mm256_set1_pd(p.fx), fy = _mm256_set1_pd(p.fy);
  const __m256d cx = _mm256_set1_pd(p.cx), cy = _mm256_set1_pd(p.cy);
  const __m256d w = _mm256_set1_pd(p.width), h = _mm256_set1_pd(p.height);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d invalid = _mm256_set1_pd(-1.0);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d y = _mm256_loadu_pd(ys + i);
    const __m256d z = _mm256_loadu_pd(zs + i);
    const __m256d qx = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r0, x), _mm256_mul_pd(r1, y)),
                      _mm256_mul_pd(r2, z)),
        tx);
    const __m256d qy = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r3, x), _mm256_mul_pd(r4, y)),
                      _mm256_mul_pd(r5, z)),
        ty);
    const __m256d qz = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r6, x), _mm256_mul_pd(r7, y)),
                      _mm256_mul_pd(r8, z)),
        tz);
    const __m256d u = _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(fx, qx), qz), cx);
    const __m256d v = _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(fy, qy), qz), cy);
    __m256d valid = _mm256_cmp_pd(qz, zero, _CMP_GT_OQ);
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(u, zero, _CMP_GE_OQ));
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(u, w, _CMP_LT_OQ));
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(v, zero, _CMP_GE_OQ));
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(v, h, _CMP_LT_OQ));
    const __m256d index = _mm256_add_pd(_mm256_mul_pd(_mm256_floor_pd(v), w), _mm256_floor_pd(u));
    const __m256d selected = _mm256_blendv_pd(invalid, index, valid);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(pixel + i), _mm256_cvttpd_epi32(selected));
  }
  if (i < n) {
    scalar_kernels().project_points(xs + i, ys + i, zs + i, n - i, p, pixel + i);
  }
}

#undef DYNSLAM_AVX2

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels table{Isa::Avx2, &squared_distances_avx2, &range_stats_avx2,
                             &or_into_avx2, &project_points_avx2};
  return &table;
}

#else

const Kernels* avx2_kernels() { return nullptr; }

#endif

}  // namespace dynslam::simd
