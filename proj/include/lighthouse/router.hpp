#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lighthouse/coast_tree.hpp"

namespace lighthouse {

// Down-sampling threshold: consecutive retained coastal points along a
// polyline stay within this arc length of each other.
inline constexpr double kDefaultMaxGapM = 1000.0;
inline constexpr uint16_t kGeneratorFormatVersion = 1;

// A connected run of coastal edge cells within one tile, in walk order.
struct CoastPolyline {
  TileId tile;
  std::vector<GeoPoint> vertices;
};

struct Generator {
  GeoPoint point;
  // Canonical radian form; this is what the file format stores and what the
  // routing tree is built on, so round-trips stay bit-exact.
  PointRad point_rad;
  TileId tile;

  static Generator of(const GeoPoint& p, TileId tile) {
    return Generator{p, {p.lat_rad(), p.lon_rad()}, tile};
  }
};

struct GeneratorSet {
  std::vector<Generator> generators;
  double max_gap_m = kDefaultMaxGapM;
};

// Chains a tile's edge cells into polylines by 8-connectivity. Walks extend
// from the lowest unvisited (row, col) cell in both directions, always
// taking the lowest unvisited neighbor; junction branches become separate
// polylines. Every edge cell lands in exactly one polyline.
std::vector<CoastPolyline> chain_polylines(const EdgeSet& edges);

// Greedy arc-length down-sampling. Always keeps the first and last vertex of
// every polyline; keeps an interior vertex whenever skipping it would put
// the next vertex more than max_gap_m (along the polyline) from the last
// retained one.
GeneratorSet downsample(std::span<const CoastPolyline> polylines,
                        double max_gap_m = kDefaultMaxGapM);

struct RouteHit {
  TileId tile;
  uint32_t generator_index = 0;
  double distance_m = 0.0;
};

// Spherical-Voronoi-equivalent point location: a cell lookup is exactly a
// nearest-generator query, so the router reuses the ball tree instead of an
// explicit tessellation. Ties resolve to the lowest generator index.
class Router {
 public:
  explicit Router(GeneratorSet gens);

  const GeneratorSet& generators() const { return gens_; }
  size_t size() const { return gens_.generators.size(); }
  double max_gap_m() const { return gens_.max_gap_m; }

  TileId route(const GeoPoint& q) const;
  RouteHit nearest_generator(const GeoPoint& q) const;

  // Tiles of every generator within bound_m of q, deduplicated and sorted.
  std::vector<TileId> route_k(const GeoPoint& q, double bound_m) const;

 private:
  GeneratorSet gens_;
  CoastTree index_;
  std::vector<uint32_t> gen_of_point_;  // tree point index -> generator index
};

std::vector<uint8_t> serialize_generators(const GeneratorSet& gens);
GeneratorSet deserialize_generators(std::span<const uint8_t> bytes);

}  // namespace lighthouse
