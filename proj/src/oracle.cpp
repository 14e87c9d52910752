#include "lighthouse/oracle.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "lighthouse/binary_io.hpp"

namespace lighthouse {
namespace oracle {

namespace {

// Minimal LHBT point extraction, independent of the production deserializer.
void read_tree_points(const std::string& path, TileId expect,
                      std::vector<PointRad>& out) {
  std::vector<uint8_t> bytes = read_file(path);
  if (bytes.size() < 36 || std::memcmp(bytes.data(), "LHBT", 4) != 0) {
    raise(ErrorCode::bad_magic, path + ": not a ball tree file");
  }
  auto u16_at = [&](size_t i) {
    return uint16_t(bytes[i]) | uint16_t(bytes[i + 1]) << 8;
  };
  auto u64_at = [&](size_t i) {
    uint64_t v = 0;
    for (size_t k = 0; k < 8; ++k) v |= uint64_t(bytes[i + k]) << (8 * k);
    return v;
  };
  if (u16_at(4) != 1) {
    raise(ErrorCode::version_mismatch, path + ": unsupported tree version");
  }
  TileId tile{int16_t(u16_at(8)), int16_t(u16_at(10))};
  if (!(tile == expect)) {
    raise(ErrorCode::invalid_argument,
          path + ": tile header " + tile.name() + " != manifest entry " +
              expect.name());
  }
  uint64_t n_points = u64_at(12);
  if (bytes.size() < 32 + n_points * 16) {
    raise(ErrorCode::truncated_payload, path + ": truncated point array");
  }
  for (uint64_t i = 0; i < n_points; ++i) {
    PointRad p;
    uint64_t lat_bits = u64_at(32 + i * 16);
    uint64_t lon_bits = u64_at(32 + i * 16 + 8);
    std::memcpy(&p.lat, &lat_bits, 8);
    std::memcpy(&p.lon, &lon_bits, 8);
    out.push_back(p);
  }
}

}  // namespace

FlatIndex FlatIndex::from_dataset(const Manifest& m) {
  FlatIndex idx;
  for (const auto& t : m.tiles) {
    size_t before = idx.points_.size();
    read_tree_points(m.path_of(t.tree_file), t.tile, idx.points_);
    for (size_t i = before; i < idx.points_.size(); ++i) {
      idx.tiles_.push_back(t.tile);
      idx.index_in_tile_.push_back(uint32_t(i - before));
    }
  }
  return idx;
}

FlatIndex::Hit FlatIndex::brute_nearest(const GeoPoint& q) const {
  if (points_.empty()) {
    raise(ErrorCode::empty_tree, "brute_nearest on empty index");
  }
  double qlat = q.lat_rad(), qlon = q.lon_rad();
  double best = std::numeric_limits<double>::infinity();
  size_t best_i = 0;
  // Entries are ordered by (tile, index); strict < keeps the first of any
  // exact tie, which is the lexicographically smallest provenance.
  for (size_t i = 0; i < points_.size(); ++i) {
    double a = central_angle_rad(qlat, qlon, points_[i].lat, points_[i].lon);
    if (a < best) {
      best = a;
      best_i = i;
    }
  }
  Hit hit;
  hit.tile = tiles_[best_i];
  hit.index = index_in_tile_[best_i];
  hit.point = GeoPoint::from_radians(points_[best_i].lat, points_[best_i].lon);
  hit.distance_m = haversine_m(q, hit.point);
  return hit;
}

std::vector<PixelCoord> brute_sobel(const BitMask& m) {
  if (m.n_rows < 2 || m.n_cols < 2) {
    raise(ErrorCode::invalid_argument, "mask must be at least 2x2");
  }
  static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  auto sample = [&](int r, int c) {
    r = std::max(0, std::min(m.n_rows - 1, r));
    c = std::max(0, std::min(m.n_cols - 1, c));
    return int(m.at(r, c));
  };
  std::vector<PixelCoord> out;
  for (int r = 0; r < m.n_rows; ++r) {
    for (int c = 0; c < m.n_cols; ++c) {
      int gx = 0, gy = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          int v = sample(r + dr, c + dc);
          gx += kx[dr + 1][dc + 1] * v;
          gy += ky[dr + 1][dc + 1] * v;
        }
      }
      if (gx * gx + gy * gy > 0) out.push_back({r, c});
    }
  }
  return out;
}

}  // namespace oracle
}  // namespace lighthouse
