#include "dynslam/core/cloud_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dynslam {

namespace {

constexpr std::array<char, 4> kMagic = {'M', 'M', 'P', 'C'};
constexpr std::size_t kRecordBytes = 16;

void put_u32(unsigned char* dst, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) dst[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFFu);
}

std::uint32_t get_u32(const unsigned char* src) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(src[i]) << (8 * i);
  return v;
}

void put_f32(unsigned char* dst, float f) { put_u32(dst, std::bit_cast<std::uint32_t>(f)); }
float get_f32(const unsigned char* src) { return std::bit_cast<float>(get_u32(src)); }

}  // namespace

void write_mmpc(std::ostream& out, const PointCloud& cloud) {
  if (cloud.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw CloudIoError("MMPC: too many points");
  }
  out.write(kMagic.data(), kMagic.size());
  unsigned char header[4];
  put_u32(header, static_cast<std::uint32_t>(cloud.size()));
  out.write(reinterpret_cast<const char*>(header), 4);

  std::vector<unsigned char> buf(cloud.size() * kRecordBytes);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud[i];
    unsigned char* rec = buf.data() + i * kRecordBytes;
    put_f32(rec + 0, static_cast<float>(p.position.x()));
    put_f32(rec + 4, static_cast<float>(p.position.y()));
    put_f32(rec + 8, static_cast<float>(p.position.z()));
    const Rgb c = p.color.value_or(Rgb{});
    rec[12] = c.r;
    rec[13] = c.g;
    rec[14] = c.b;
    rec[15] = p.label.to_byte();
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw CloudIoError("MMPC: write failed");
}

void write_mmpc(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CloudIoError("cannot open for writing: " + path.string());
  write_mmpc(out, cloud);
}

PointCloud read_mmpc(std::istream& in) {
  std::array<char, 4> magic{};
  unsigned char header[4];
  if (!in.read(magic.data(), 4) || magic != kMagic) {
    throw CloudIoError("MMPC: bad magic");
  }
  if (!in.read(reinterpret_cast<char*>(header), 4)) {
    throw CloudIoError("MMPC: truncated header");
  }
  const std::uint32_t count = get_u32(header);
  std::vector<unsigned char> buf(static_cast<std::size_t>(count) * kRecordBytes);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
    throw CloudIoError("MMPC: truncated body, expected " + std::to_string(count) + " points");
  }
  PointCloud cloud;
  cloud.points.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const unsigned char* rec = buf.data() + static_cast<std::size_t>(i) * kRecordBytes;
    Point& p = cloud.points[i];
    p.position = Vec3(get_f32(rec), get_f32(rec + 4), get_f32(rec + 8));
    if (!p.position.allFinite()) {
      throw CloudIoError("MMPC: non-finite position at point " + std::to_string(i));
    }
    p.color = Rgb{rec[12], rec[13], rec[14]};
    p.label = Label::from_byte(rec[15]);
    p.scan_index = i;
  }
  return cloud;
}

PointCloud read_mmpc(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CloudIoError("cannot open: " + path.string());
  try {
    return read_mmpc(in);
  } catch (const CloudIoError& e) {
    throw CloudIoError(path.string() + ": " + e.what());
  }
}

void write_xyz(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw CloudIoError("cannot open for writing: " + path.string());
  out.precision(9);
  for (const Point& p : cloud.points) {
    const Rgb c = p.color.value_or(Rgb{});
    out << p.position.x() << ' ' << p.position.y() << ' ' << p.position.z() << ' '
        << int(c.r) << ' ' << int(c.g) << ' ' << int(c.b) << ' ' << int(p.label.to_byte())
        << '\n';
  }
  if (!out) throw CloudIoError("write failed: " + path.string());
}

PointCloud read_xyz(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> v;
    double x;
    while (fields >> x) v.push_back(x);
    if (!fields.eof() || (v.size() != 3 && v.size() != 6 && v.size() != 7)) {
      throw CloudIoError("XYZ line " + std::to_string(line_no) +
                         ": expected 3, 6 or 7 numeric columns");
    }
    Point p;
    p.position = Vec3(v[0], v[1], v[2]);
    if (!p.position.allFinite()) {
      throw CloudIoError("XYZ line " + std::to_string(line_no) + ": non-finite position");
    }
    if (v.size() >= 6) {
      for (int c = 3; c < 6; ++c) {
        if (v[c] < 0 || v[c] > 255) {
          throw CloudIoError("XYZ line " + std::to_string(line_no) + ": color out of range");
        }
      }
      p.color = Rgb{static_cast<std::uint8_t>(v[3]), static_cast<std::uint8_t>(v[4]),
                    static_cast<std::uint8_t>(v[5])};
    }
    if (v.size() == 7) {
      if (v[6] < 0 || v[6] > 255) {
        throw CloudIoError("XYZ line " + std::to_string(line_no) + ": label out of range");
      }
      p.label = Label::from_byte(static_cast<std::uint8_t>(v[6]));
    }
    p.scan_index = static_cast<std::uint32_t>(cloud.size());
    cloud.points.push_back(p);
  }
  return cloud;
}

PointCloud read_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CloudIoError("cannot open: " + path.string());
  return read_xyz(in);
}

PointCloud read_cloud(const std::filesystem::path& path) {
  return path.extension() == ".mmpc" ? read_mmpc(path) : read_xyz(path);
}

}  // namespace dynslam
