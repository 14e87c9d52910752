#pragma once

#include <cstdint>
#include <vector>

#include "lighthouse/raster.hpp"
#include "lighthouse/store.hpp"

namespace lighthouse {
namespace oracle {

// Every edge point of every tile, concatenated with provenance. The linear
// scan over this index is the ground truth the engine is audited against.
// Shares only geo-core with production code: tree files are parsed here with
// a standalone reader, not the coast-tree deserializer.
class FlatIndex {
 public:
  struct Hit {
    GeoPoint point;
    double distance_m = 0.0;
    TileId tile;
    uint32_t index = 0;  // position in the tile's tree point array
  };

  static FlatIndex from_dataset(const Manifest& m);

  size_t size() const { return points_.size(); }

  // Linear-scan nearest; ties resolve to the lexicographically smallest
  // (tile, index).
  Hit brute_nearest(const GeoPoint& q) const;

 private:
  std::vector<PointRad> points_;
  std::vector<TileId> tiles_;
  std::vector<uint32_t> index_in_tile_;
};

// Straight-line 3x3 Sobel transcription (per-cell convolution, replicate
// padding); compared cell for cell against ingest::sobel_edges.
std::vector<PixelCoord> brute_sobel(const BitMask& m);

}  // namespace oracle
}  // namespace lighthouse
