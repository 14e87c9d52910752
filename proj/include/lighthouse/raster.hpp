#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "lighthouse/geo.hpp"

namespace lighthouse {

// Land-cover class code. 0 is water; every non-zero code binarizes to
// "rest" (land, ice, built-up, ...).
struct ClassLabel {
  uint8_t code = 0;

  bool is_water() const { return code == 0; }
  bool operator==(const ClassLabel&) const = default;
};

inline constexpr uint8_t kWaterClass = 0;
inline constexpr uint8_t kLandClass = 1;

// Per-tile grid of class labels, row-major; row 0 is the tile's north edge,
// col 0 its west edge. Each cell covers (1/n_rows) x (1/n_cols) degrees.
struct RasterTile {
  TileId tile;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<uint8_t> classes;

  uint8_t at(int row, int col) const {
    return classes[size_t(row) * size_t(n_cols) + size_t(col)];
  }
  uint8_t& at(int row, int col) {
    return classes[size_t(row) * size_t(n_cols) + size_t(col)];
  }
};

// Water-vs-rest binarization of a RasterTile. bits[i] != 0 means water.
struct BitMask {
  TileId tile;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<uint8_t> bits;

  uint8_t at(int row, int col) const {
    return bits[size_t(row) * size_t(n_cols) + size_t(col)];
  }
};

struct PixelCoord {
  int row = 0;
  int col = 0;

  auto operator<=>(const PixelCoord&) const = default;
};

// Coastal edge cells of one tile: the cells where the Sobel gradient of the
// water mask is nonzero, plus their geographic centers. Sorted by
// (row, col), no duplicates.
struct EdgeSet {
  TileId tile;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<PixelCoord> cells;
  std::vector<GeoPoint> points;

  bool empty() const { return cells.empty(); }
  size_t size() const { return cells.size(); }
};

// Closed rings of land polygons. Outer rings counterclockwise, holes
// clockwise by convention; rasterization is even-odd and ignores winding.
struct LandPolygonSet {
  std::vector<std::vector<GeoPoint>> rings;
};

}  // namespace lighthouse
