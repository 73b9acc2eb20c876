#include "dynslam/core/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dynslam/simd/kernels.hpp"

namespace dynslam {

namespace {

constexpr std::int64_t kCoordBias = std::int64_t{1} << 20;
constexpr std::int64_t kCoordLimit = (std::int64_t{1} << 20) - 1;

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.sq_distance < b.sq_distance || (a.sq_distance == b.sq_distance && a.id < b.id);
}

std::vector<double>& scratch() {
  thread_local std::vector<double> buffer;
  return buffer;
}

}  // namespace

SpatialIndex::SpatialIndex(std::span<const Vec3> points, double cell_size) : cell_size_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("SpatialIndex: cell size must be positive");
  }
  const std::size_t n = points.size();
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("SpatialIndex: too many points");
  }

  struct Keyed {
    std::uint64_t key;
    std::uint32_t id;
    std::int64_t ix, iy, iz;
  };
  std::vector<Keyed> keyed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = points[i];
    if (!p.allFinite()) {
      throw std::invalid_argument("SpatialIndex: non-finite point");
    }
    const std::int64_t ix = cell_coord(p.x());
    const std::int64_t iy = cell_coord(p.y());
    const std::int64_t iz = cell_coord(p.z());
    if (std::abs(ix) > kCoordLimit || std::abs(iy) > kCoordLimit || std::abs(iz) > kCoordLimit) {
      throw std::invalid_argument("SpatialIndex: point outside the addressable grid");
    }
    keyed[i] = Keyed{pack(ix, iy, iz), static_cast<std::uint32_t>(i), ix, iy, iz};
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return a.key < b.key || (a.key == b.key && a.id < b.id);
  });

  xs_.resize(n);
  ys_.resize(n);
  zs_.resize(n);
  ids_.resize(n);
  slot_of_id_.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Vec3& p = points[keyed[s].id];
    xs_[s] = p.x();
    ys_[s] = p.y();
    zs_[s] = p.z();
    ids_[s] = keyed[s].id;
    slot_of_id_[keyed[s].id] = static_cast<std::uint32_t>(s);
    if (s == 0 || keyed[s].key != keyed[s - 1].key) {
      cells_.push_back(Cell{keyed[s].ix, keyed[s].iy, keyed[s].iz, static_cast<std::uint32_t>(s),
                            static_cast<std::uint32_t>(s)});
    }
    cells_.back().end = static_cast<std::uint32_t>(s + 1);
  }

  cell_lookup_.reserve(cells_.size() * 2);
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const Cell& cell = cells_[c];
    cell_lookup_.emplace(pack(cell.ix, cell.iy, cell.iz), static_cast<std::uint32_t>(c));
    const auto [col, fresh] = column_lookup_.try_emplace(
        pack(cell.ix, cell.iy, 0),
        Column{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c)});
    col->second.last = static_cast<std::uint32_t>(c + 1);
    const std::int64_t coords[3] = {cell.ix, cell.iy, cell.iz};
    for (int a = 0; a < 3; ++a) {
      if (c == 0 || coords[a] < lo_[a]) lo_[a] = coords[a];
      if (c == 0 || coords[a] > hi_[a]) hi_[a] = coords[a];
    }
  }
}

double SpatialIndex::suggest_cell_size(std::span<const Vec3> points) {
  if (points.size() < 2) return 1.0;
  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 extent = (hi - lo).cwiseMax(Vec3::Constant(1e-3));
  const double volume = extent.prod();
  const double cell = std::cbrt(volume * 4.0 / static_cast<double>(points.size()));
  return std::clamp(cell, 1e-3, extent.maxCoeff());
}

Vec3 SpatialIndex::position(std::uint32_t id) const {
  const std::uint32_t s = slot_of_id_.at(id);
  return Vec3(xs_[s], ys_[s], zs_[s]);
}

std::int64_t SpatialIndex::cell_coord(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_size_));
}

std::uint64_t SpatialIndex::pack(std::int64_t ix, std::int64_t iy, std::int64_t iz) {
  const auto enc = [](std::int64_t v) { return static_cast<std::uint64_t>(v + kCoordBias); };
  return (enc(ix) << 42) | (enc(iy) << 21) | enc(iz);
}

const SpatialIndex::Cell* SpatialIndex::find_cell(std::int64_t ix, std::int64_t iy,
                                                  std::int64_t iz) const {
  const auto it = cell_lookup_.find(pack(ix, iy, iz));
  return it == cell_lookup_.end() ? nullptr : &cells_[it->second];
}

SpatialIndex::Block SpatialIndex::block_of(const Cell& cell) const {
  return Block{xs_.data() + cell.begin, ys_.data() + cell.begin, zs_.data() + cell.begin,
               ids_.data() + cell.begin, cell.begin, static_cast<std::size_t>(cell.end - cell.begin)};
}

std::vector<Neighbor> SpatialIndex::radius_search(const Vec3& center, double radius) const {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("radius_search: radius must be positive");
  }
  std::vector<Neighbor> out;
  const double r2 = radius * radius;
  const auto& k = simd::kernels();
  auto& d2 = scratch();
  for_each_block(center, radius, [&](const Block& b) {
    d2.resize(b.size);
    k.squared_distances(b.xs, b.ys, b.zs, b.size, center.x(), center.y(), center.z(), d2.data());
    for (std::size_t i = 0; i < b.size; ++i) {
      if (d2[i] <= r2) out.push_back(Neighbor{b.ids[i], d2[i]});
    }
  });
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  return out;
}

KnnResult SpatialIndex::knn_search(const Vec3& center, std::size_t k) const {
  if (k == 0) {
    throw std::invalid_argument("knn_search: k must be >= 1");
  }
  KnnResult result;
  if (empty()) {
    result.short_result = true;
    return result;
  }
  const auto& kern = simd::kernels();
  auto& d2 = scratch();
  // Best k so far, ascending by (distance, id).
  std::vector<Neighbor> best;
  best.reserve(k + 1);
  const auto take_block = [&](const Block& b) {
    d2.resize(b.size);
    kern.squared_distances(b.xs, b.ys, b.zs, b.size, center.x(), center.y(), center.z(),
                           d2.data());
    for (std::size_t i = 0; i < b.size; ++i) {
      const Neighbor n{b.ids[i], d2[i]};
      if (best.size() == k && !neighbor_less(n, best.back())) continue;
      best.insert(std::upper_bound(best.begin(), best.end(), n, neighbor_less), n);
      if (best.size() > k) best.pop_back();
    }
  };
  const auto finish = [&]() {
    result.neighbors = std::move(best);
    result.short_result = k > size();
    return result;
  };

  if (k >= size()) {
    for (const Cell& c : cells_) take_block(block_of(c));
    return finish();
  }

  const std::int64_t c0[3] = {cell_coord(center.x()), cell_coord(center.y()),
                              cell_coord(center.z())};
  // Rings whose cube already spans the occupied bounds have seen every point.
  std::int64_t full_ring = 0;
  for (int a = 0; a < 3; ++a) {
    full_ring = std::max({full_ring, c0[a] - lo_[a], hi_[a] - c0[a]});
  }

  for (std::int64_t ring = 0;; ++ring) {
    const double side = static_cast<double>(2 * ring + 1);
    if (side * side * side > 8.0 * static_cast<double>(cells_.size())) {
      best.clear();
      for (const Cell& c : cells_) take_block(block_of(c));
      return finish();
    }
    std::int64_t lo[3], hi[3];
    bool any = true;
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(c0[a] - ring, lo_[a]);
      hi[a] = std::min(c0[a] + ring, hi_[a]);
      any = any && lo[a] <= hi[a];
    }
    if (any) {
      for (std::int64_t ix = lo[0]; ix <= hi[0]; ++ix) {
        for (std::int64_t iy = lo[1]; iy <= hi[1]; ++iy) {
          const bool inner_xy = std::abs(ix - c0[0]) < ring && std::abs(iy - c0[1]) < ring;
          for (std::int64_t iz = lo[2]; iz <= hi[2]; ++iz) {
            if (inner_xy && std::abs(iz - c0[2]) < ring) {
              iz = std::min(hi[2], c0[2] + ring - 1);  // jump over the already visited core
              continue;
            }
            if (const Cell* c = find_cell(ix, iy, iz)) take_block(block_of(*c));
          }
        }
      }
    }
    if (ring >= full_ring) return finish();
    if (best.size() >= k) {
      const double kth = best[k - 1].sq_distance;
      double bound = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 3; ++a) {
        const double lo_face = static_cast<double>(c0[a] - ring) * cell_size_;
        const double hi_face = static_cast<double>(c0[a] + ring + 1) * cell_size_;
        bound = std::min({bound, center[a] - lo_face, hi_face - center[a]});
      }
      bound = std::max(bound, 0.0);
      if (kth < bound * bound * (1.0 - 1e-9)) return finish();
    }
  }
}

SpatialIndex build_index(std::span<const Vec3> points, double cell_size) {
  if (!(cell_size > 0.0)) cell_size = SpatialIndex::suggest_cell_size(points);
  return SpatialIndex(points, cell_size);
}

SpatialIndex build_index(const PointCloud& cloud, double cell_size) {
  const std::vector<Vec3> pts = positions_of(cloud);
  return build_index(std::span<const Vec3>(pts), cell_size);
}

}  // namespace dynslam
