#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "dynslam/core/point_cloud.hpp"

namespace dynslam {

struct Neighbor {
  std::uint32_t id = 0;
  double sq_distance = 0.0;
};

struct KnnResult {
  /// Sorted by (squared distance, id).
  std::vector<Neighbor> neighbors;
  /// Fewer than k points exist in the index; all of them were returned.
  bool short_result = false;
};

/// Uniform hash grid over a fixed point set. Queries are exact: they return
/// precisely what a brute-force scan returns. Read-only after construction,
/// so concurrent queries are safe.
///
/// Point ids are positions in the input sequence.
class SpatialIndex {
 public:
  /// Contiguous run of points from one or more cells, in SoA layout.
  struct Block {
    const double* xs;
    const double* ys;
    const double* zs;
    const std::uint32_t* ids;
    std::size_t offset;  // position of xs[0] in storage order
    std::size_t size;
  };

  SpatialIndex() = default;
  SpatialIndex(std::span<const Vec3> points, double cell_size);

  /// Cell edge giving a few points per cell for the given set.
  static double suggest_cell_size(std::span<const Vec3> points);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  double cell_size() const { return cell_size_; }
  Vec3 position(std::uint32_t id) const;

  /// Points with distance <= radius, sorted by id.
  std::vector<Neighbor> radius_search(const Vec3& center, double radius) const;

  /// The k nearest points; ties broken by smaller id.
  KnnResult knn_search(const Vec3& center, std::size_t k) const;

  /// Ids in storage order; Block::offset indexes into this.
  const std::vector<std::uint32_t>& storage_order() const { return ids_; }

  /// Visits every block whose cell may intersect the ball. Blocks may
  /// contain points outside the ball.
  template <class Fn>
  void for_each_block(const Vec3& center, double radius, Fn&& fn) const;

 private:
  struct Cell {
    std::int64_t ix, iy, iz;
    std::uint32_t begin, end;
  };
  // Cells sharing (ix, iy) are adjacent in cells_ and in storage, ascending iz.
  struct Column {
    std::uint32_t first, last;  // cell range [first, last)
  };

  std::int64_t cell_coord(double v) const;
  static std::uint64_t pack(std::int64_t ix, std::int64_t iy, std::int64_t iz);
  const Cell* find_cell(std::int64_t ix, std::int64_t iy, std::int64_t iz) const;
  Block block_of(const Cell& cell) const;

  double cell_size_ = 1.0;
  std::vector<double> xs_, ys_, zs_;
  std::vector<std::uint32_t> ids_;
  std::vector<std::uint32_t> slot_of_id_;
  std::vector<Cell> cells_;
  std::unordered_map<std::uint64_t, std::uint32_t> cell_lookup_;
  std::unordered_map<std::uint64_t, Column> column_lookup_;
  std::int64_t lo_[3] = {0, 0, 0};
  std::int64_t hi_[3] = {-1, -1, -1};
};

/// Indexes the cloud's positions. cell_size <= 0 picks one automatically.
SpatialIndex build_index(const PointCloud& cloud, double cell_size = 0.0);
SpatialIndex build_index(std::span<const Vec3> points, double cell_size = 0.0);

template <class Fn>
void SpatialIndex::for_each_block(const Vec3& center, double radius, Fn&& fn) const {
  if (empty()) return;
  std::int64_t lo[3], hi[3];
  std::uint64_t range_cells = 1;
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(cell_coord(center[a] - radius), lo_[a]);
    hi[a] = std::min(cell_coord(center[a] + radius), hi_[a]);
    if (lo[a] > hi[a]) return;
    range_cells *= static_cast<std::uint64_t>(hi[a] - lo[a] + 1);
  }
  if (range_cells > cells_.size()) {
    for (const Cell& c : cells_) {
      if (c.ix >= lo[0] && c.ix <= hi[0] && c.iy >= lo[1] && c.iy <= hi[1] && c.iz >= lo[2] &&
          c.iz <= hi[2]) {
        fn(block_of(c));
      }
    }
    return;
  }
  for (std::int64_t ix = lo[0]; ix <= hi[0]; ++ix) {
    for (std::int64_t iy = lo[1]; iy <= hi[1]; ++iy) {
      const auto it = column_lookup_.find(pack(ix, iy, 0));
      if (it == column_lookup_.end()) continue;
      std::uint32_t a = it->second.first, b = it->second.last;
      while (a < b && cells_[a].iz < lo[2]) ++a;
      while (b > a && cells_[b - 1].iz > hi[2]) --b;
      if (a == b) continue;
      const std::uint32_t begin = cells_[a].begin;
      fn(Block{xs_.data() + begin, ys_.data() + begin, zs_.data() + begin, ids_.data() + begin,
               begin, static_cast<std::size_t>(cells_[b - 1].end - begin)});
    }
  }
}

}  // namespace dynslam
