#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dynslam::detail {

struct Gray16Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;
};

/// Reads 8- or 16-bit single-channel PNGs; 8-bit values are widened as-is.
/// Throws std::runtime_error on any libpng failure or unsupported color type.
Gray16Image read_gray_png(const std::filesystem::path& path);
void write_gray16_png(const std::filesystem::path& path, const Gray16Image& image);

}  // namespace dynslam::detail
