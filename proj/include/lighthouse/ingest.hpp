#pragma once

#include <string>
#include <vector>

#include "lighthouse/raster.hpp"

namespace lighthouse {

// Desk-scale default grid, ~30 m cells at the equator. The 10 m product
// corresponds to ~11000^2 cells per tile; supported, not default.
inline constexpr int kDefaultGrid = 3600;

// Rasterizes land polygons onto a tile grid: a cell is labeled land iff its
// center falls inside an odd number of rings (even-odd rule).
RasterTile rasterize_polygons(const LandPolygonSet& polys, TileId tile,
                              int n_rows, int n_cols);

BitMask binarize(const RasterTile& r);

// Cells where the 3x3 Sobel gradient magnitude of the 0/1 mask is nonzero,
// with replicate padding at tile borders. Sorted by (row, col).
std::vector<PixelCoord> sobel_edges(const BitMask& m);

// Geographic center of cell (row, col); row 0 is the north edge, col 0 the
// west edge.
GeoPoint pixel_center_geo(TileId tile, int row, int col, int n_rows,
                          int n_cols);

struct TileArtifacts {
  EdgeSet edges;
  BitMask mask;
};

// Runs the per-tile pipeline: binarize, detect edges, map edge cells to
// geographic centers. Rejects all-water rasters with not_a_land_tile.
TileArtifacts build_tile(const RasterTile& source);

// Parses the newline-delimited ring text format: one ring per line, vertices
// as comma-separated "lat lon" pairs.
LandPolygonSet parse_rings(const std::string& text);

}  // namespace lighthouse
