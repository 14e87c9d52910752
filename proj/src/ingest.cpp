#include "lighthouse/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace lighthouse {

namespace {

using IntGrid =
    Eigen::Array<int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_dims(int n_rows, int n_cols) {
  if (n_rows < 2 || n_cols < 2) {
    raise(ErrorCode::invalid_argument,
          "grid must be at least 2x2, got " + std::to_string(n_rows) + "x" +
              std::to_string(n_cols));
  }
}

// Even-odd crossing test against every ring; boundary cases resolved by the
// half-open ray rule so results are deterministic.
bool center_is_land(const LandPolygonSet& polys, double lat, double lon) {
  bool inside = false;
  for (const auto& ring : polys.rings) {
    size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
      double yi = ring[i].lat, xi = ring[i].lon;
      double yj = ring[j].lat, xj = ring[j].lon;
      if ((yi > lat) != (yj > lat)) {
        double x_cross = xj + (lat - yj) / (yi - yj) * (xi - xj);
        if (lon < x_cross) inside = !inside;
      }
    }
  }
  return inside;
}

void validate_ring(const std::vector<GeoPoint>& ring, size_t index) {
  auto reject = [&](const std::string& why) {
    raise(ErrorCode::degenerate_ring,
          "ring " + std::to_string(index) + " is degenerate: " + why);
  };
  if (ring.size() < 4) reject("fewer than 3 distinct vertices");
  if (!(ring.front() == ring.back())) reject("not closed");
  std::vector<GeoPoint> distinct(ring.begin(), ring.end() - 1);
  std::sort(distinct.begin(), distinct.end(), [](const auto& a, const auto& b) {
    return a.lat != b.lat ? a.lat < b.lat : a.lon < b.lon;
  });
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 3) reject("fewer than 3 distinct vertices");
  double area2 = 0.0;  // shoelace in the lat/lon plane
  for (size_t i = 0, n = ring.size() - 1; i < n; ++i) {
    area2 += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
  }
  if (area2 == 0.0) reject("zero area (collinear vertices)");
}

}  // namespace

RasterTile rasterize_polygons(const LandPolygonSet& polys, TileId tile,
                              int n_rows, int n_cols) {
  check_dims(n_rows, n_cols);
  for (size_t i = 0; i < polys.rings.size(); ++i) {
    validate_ring(polys.rings[i], i);
  }
  RasterTile out;
  out.tile = tile;
  out.n_rows = n_rows;
  out.n_cols = n_cols;
  out.classes.assign(size_t(n_rows) * size_t(n_cols), kWaterClass);
  for (int row = 0; row < n_rows; ++row) {
    double lat = tile.lat_floor + 1.0 - (row + 0.5) / n_rows;
    for (int col = 0; col < n_cols; ++col) {
      double lon = tile.lon_floor + (col + 0.5) / n_cols;
      if (center_is_land(polys, lat, lon)) out.at(row, col) = kLandClass;
    }
  }
  return out;
}

BitMask binarize(const RasterTile& r) {
  BitMask m;
  m.tile = r.tile;
  m.n_rows = r.n_rows;
  m.n_cols = r.n_cols;
  m.bits.resize(r.classes.size());
  std::transform(r.classes.begin(), r.classes.end(), m.bits.begin(),
                 [](uint8_t code) { return uint8_t(code == kWaterClass); });
  return m;
}

std::vector<PixelCoord> sobel_edges(const BitMask& m) {
  check_dims(m.n_rows, m.n_cols);
  const int rows = m.n_rows, cols = m.n_cols;

  // Replicate-padded copy, then the two gradients as shifted-block sums.
  IntGrid pad(rows + 2, cols + 2);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      pad(r + 1, c + 1) = m.at(r, c);
    }
  }
  pad.row(0) = pad.row(1);
  pad.row(rows + 1) = pad.row(rows);
  pad.col(0) = pad.col(1);
  pad.col(cols + 1) = pad.col(cols);

  auto blk = [&](int dr, int dc) { return pad.block(dr, dc, rows, cols); };
  IntGrid gx = (blk(0, 2) + 2 * blk(1, 2) + blk(2, 2)) -
               (blk(0, 0) + 2 * blk(1, 0) + blk(2, 0));
  IntGrid gy = (blk(2, 0) + 2 * blk(2, 1) + blk(2, 2)) -
               (blk(0, 0) + 2 * blk(0, 1) + blk(0, 2));
  IntGrid mag2 = gx.square() + gy.square();

  std::vector<PixelCoord> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (mag2(r, c) > 0) edges.push_back({r, c});
    }
  }
  return edges;  // row-major scan order == sorted by (row, col)
}

GeoPoint pixel_center_geo(TileId tile, int row, int col, int n_rows,
                          int n_cols) {
  if (row < 0 || row >= n_rows || col < 0 || col >= n_cols) {
    raise(ErrorCode::out_of_range,
          "pixel (" + std::to_string(row) + ", " + std::to_string(col) +
              ") outside grid " + std::to_string(n_rows) + "x" +
              std::to_string(n_cols));
  }
  double lat = tile.lat_floor + 1.0 - (row + 0.5) / n_rows;
  double lon = tile.lon_floor + (col + 0.5) / n_cols;
  return GeoPoint(lat, lon);
}

TileArtifacts build_tile(const RasterTile& source) {
  check_dims(source.n_rows, source.n_cols);
  if (source.classes.size() !=
      size_t(source.n_rows) * size_t(source.n_cols)) {
    raise(ErrorCode::dimension_mismatch, "raster cell count does not match dims");
  }
  BitMask mask = binarize(source);
  bool any_land =
      std::any_of(mask.bits.begin(), mask.bits.end(), [](uint8_t w) { return !w; });
  if (!any_land) {
    raise(ErrorCode::not_a_land_tile,
          "tile " + source.tile.name() + " contains no land");
  }
  EdgeSet edges;
  edges.tile = source.tile;
  edges.n_rows = source.n_rows;
  edges.n_cols = source.n_cols;
  edges.cells = sobel_edges(mask);
  edges.points.reserve(edges.cells.size());
  for (const auto& cell : edges.cells) {
    edges.points.push_back(pixel_center_geo(source.tile, cell.row, cell.col,
                                            source.n_rows, source.n_cols));
  }
  return TileArtifacts{std::move(edges), std::move(mask)};
}

LandPolygonSet parse_rings(const std::string& text) {
  LandPolygonSet out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<GeoPoint> ring;
    std::istringstream pairs(line);
    std::string pair;
    while (std::getline(pairs, pair, ',')) {
      std::istringstream vals(pair);
      double lat = 0, lon = 0;
      if (!(vals >> lat >> lon)) {
        raise(ErrorCode::invalid_argument,
              "ring " + std::to_string(out.rings.size()) +
                  ": cannot parse vertex \"" + pair + "\"");
      }
      ring.emplace_back(lat, lon);
    }
    out.rings.push_back(std::move(ring));
  }
  return out;
}

}  // namespace lighthouse
