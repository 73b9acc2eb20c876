#pragma once

#include <cstdint>
#include <vector>

namespace dynslam {

struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool empty() const { return width <= 0 || height <= 0; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Row-major binary image, one byte per pixel holding 0 or 1.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return pixels_.size(); }

  bool at(int x, int y) const { return pixels_[index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { pixels_[index(x, y)] = value ? 1 : 0; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::uint8_t* row(int y) { return pixels_.data() + index(0, y); }
  const std::uint8_t* row(int y) const { return pixels_.data() + index(0, y); }
  const std::vector<std::uint8_t>& data() const { return pixels_; }
  std::vector<std::uint8_t>& data() { return pixels_; }

  std::size_t count() const;
  bool same_size(const BinaryImage& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// Tight bounding rectangle of set pixels; empty rect if none are set.
  PixelRect bounding_box() const;

  BinaryImage complement() const;

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Set = "dynamic state", clear = "static state".
using DynamicMaskImage = BinaryImage;

/// a is a subset of b (same size required).
bool is_subset(const BinaryImage& a, const BinaryImage& b);

}  // namespace dynslam
