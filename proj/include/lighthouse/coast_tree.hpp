#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lighthouse/raster.hpp"

namespace lighthouse {

inline constexpr uint32_t kDefaultLeafSize = 32;
inline constexpr uint32_t kNoChild = 0xFFFFFFFFu;
inline constexpr uint16_t kTreeFormatVersion = 1;

// (lat, lon) in radians; the tree's internal point representation, chosen so
// the query loop never converts units.
struct PointRad {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const PointRad&) const = default;
};

struct TreeNode {
  double center_lat = 0.0;  // radians
  double center_lon = 0.0;
  double radius = 0.0;  // radians; every point in [start, end) is within it
  uint64_t start = 0;
  uint64_t end = 0;
  uint32_t left = kNoChild;
  uint32_t right = kNoChild;

  bool is_leaf() const { return left == kNoChild; }
};

struct NearestHit {
  GeoPoint point;
  double distance_m = 0.0;
  uint32_t index = 0;  // position in the tree's point array
};

// Raw search result: central angle plus internal point index. The engine
// merges these across tiles before converting to meters.
struct RawHit {
  double angle = 0.0;
  uint32_t index = 0;
};

// Immutable ball tree over one tile's coastal edge points under the
// great-circle metric. Construction is deterministic: split along the widest
// tangent-plane spread at the node centroid, at the median, ties broken by
// lowest input index.
class CoastTree {
 public:
  CoastTree() = default;

  static CoastTree build(const EdgeSet& edges,
                         uint32_t leaf_size = kDefaultLeafSize);
  static CoastTree build(TileId tile, std::span<const GeoPoint> points,
                         uint32_t leaf_size = kDefaultLeafSize);
  static CoastTree build(TileId tile, std::span<const PointRad> points,
                         uint32_t leaf_size = kDefaultLeafSize);

  // Marker for tiles whose land never meets water inside the tile.
  static CoastTree empty_marker(TileId tile,
                                uint32_t leaf_size = kDefaultLeafSize);

  bool empty() const { return points_.empty(); }
  size_t size() const { return points_.size(); }
  TileId tile() const { return tile_; }
  uint32_t leaf_size() const { return leaf_size_; }

  const std::vector<PointRad>& points() const { return points_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  // Build permutation: points()[i] came from input index input_index()[i].
  // Populated by build(), empty after deserialize().
  const std::vector<uint32_t>& input_index() const { return input_index_; }

  GeoPoint point_geo(uint32_t index) const;

  // Exact nearest neighbor; ties broken by lowest point index. Throws
  // empty_tree on the empty marker.
  NearestHit nearest(const GeoPoint& q) const;
  RawHit nearest_raw(double qlat_rad, double qlon_rad) const;

  std::vector<uint8_t> serialize() const;
  static CoastTree deserialize(std::span<const uint8_t> bytes);

 private:
  TileId tile_;
  uint32_t leaf_size_ = kDefaultLeafSize;
  std::vector<PointRad> points_;
  std::vector<TreeNode> nodes_;
  std::vector<uint32_t> input_index_;
};

}  // namespace lighthouse
