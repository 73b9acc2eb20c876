#include "dynslam/mask/binary_image.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dynslam {

BinaryImage::BinaryImage(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw std::invalid_argument("BinaryImage: negative dimensions");
  }
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BinaryImage::count() const {
  return static_cast<std::size_t>(std::count_if(pixels_.begin(), pixels_.end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

PixelRect BinaryImage::bounding_box() const {
  int x0 = width_, y0 = height_, x1 = -1, y1 = -1;
  for (int y = 0; y < height_; ++y) {
    const std::uint8_t* r = row(y);
    for (int x = 0; x < width_; ++x) {
      if (r[x]) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < 0) return PixelRect{};
  return PixelRect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

BinaryImage BinaryImage::complement() const {
  BinaryImage out = *this;
  for (auto& v : out.pixels_) v = v ? 0 : 1;
  return out;
}

bool is_subset(const BinaryImage& a, const BinaryImage& b) {
  if (!a.same_size(b)) throw std::invalid_argument("is_subset: size mismatch");
  const auto& da = a.data();
  const auto& db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (da[i] && !db[i]) return false;
  }
  return true;
}

}  // namespace dynslam
