#include "dynslam/mask/morphology.hpp"

#include <algorithm>
#include <stdexcept>

#include "dynslam/simd/kernels.hpp"

namespace dynslam {

BinaryImage dilate(const BinaryImage& mask, int radius) {
  if (radius < 0) throw std::invalid_argument("dilate: radius must be >= 0");
  if (radius == 0 || mask.pixel_count() == 0) return mask;

  const auto& k = simd::kernels();
  const int w = mask.width();
  const int h = mask.height();
  const int rx = std::min(radius, w - 1);
  const int ry = std::min(radius, h - 1);

  BinaryImage horizontal = mask;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = mask.row(y);
    std::uint8_t* dst = horizontal.row(y);
    for (int s = 1; s <= rx; ++s) {
      const auto n = static_cast<std::size_t>(w - s);
      k.or_into(dst + s, src, n);  // dst[x] |= src[x - s]
      k.or_into(dst, src + s, n);  // dst[x] |= src[x + s]
    }
  }

  BinaryImage out = horizontal;
  const auto row_bytes = static_cast<std::size_t>(w);
  for (int y = 0; y < h; ++y) {
    std::uint8_t* dst = out.row(y);
    const int y0 = std::max(0, y - ry);
    const int y1 = std::min(h - 1, y + ry);
    for (int yy = y0; yy <= y1; ++yy) {
      if (yy != y) k.or_into(dst, horizontal.row(yy), row_bytes);
    }
  }
  return out;
}

BinaryImage erode(const BinaryImage& mask, int radius) {
  if (radius < 0) throw std::invalid_argument("erode: radius must be >= 0");
  if (radius == 0) return mask;
  return dilate(mask.complement(), radius).complement();
}

}  // namespace dynslam
