#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "dynslam/core/point_cloud.hpp"

namespace dynslam {

class CloudIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary frame format, little-endian:
//   "MMPC" | u32 count | count x { f32 x, f32 y, f32 z, u8 r, u8 g, u8 b, u8 label }
// Colors are always present after a read; uncolored points are written black.
void write_mmpc(std::ostream& out, const PointCloud& cloud);
void write_mmpc(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_mmpc(std::istream& in);
PointCloud read_mmpc(const std::filesystem::path& path);

// ASCII variant: one point per line, "x y z [r g b [label]]". Blank lines and
// lines starting with '#' are ignored.
void write_xyz(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_xyz(std::istream& in);
PointCloud read_xyz(const std::filesystem::path& path);

/// Dispatches on extension: .mmpc is binary, anything else ASCII.
PointCloud read_cloud(const std::filesystem::path& path);

}  // namespace dynslam
