#include "lighthouse/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lighthouse/binary_io.hpp"
#include "lighthouse/ingest.hpp"

namespace lighthouse {

namespace {

constexpr double kPruneSlack = 1e-12;
constexpr size_t kGenHeaderBytes = 14;
constexpr size_t kGenRecordBytes = 24;

// Neighbor probe order; "lowest (row, col)" among unvisited neighbors.
constexpr int kNbr[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                            {0, 1},   {1, -1}, {1, 0},  {1, 1}};

}  // namespace

std::vector<CoastPolyline> chain_polylines(const EdgeSet& edges) {
  std::vector<CoastPolyline> out;
  if (edges.cells.empty()) return out;

  // Cell lookup grid; edge sets are sparse but tiles are small enough that a
  // dense visited map is the simple choice.
  const int rows = edges.n_rows, cols = edges.n_cols;
  std::vector<int32_t> cell_index(size_t(rows) * size_t(cols), -1);
  for (size_t i = 0; i < edges.cells.size(); ++i) {
    const auto& c = edges.cells[i];
    cell_index[size_t(c.row) * cols + c.col] = int32_t(i);
  }
  std::vector<uint8_t> visited(edges.cells.size(), 0);

  auto next_unvisited = [&](PixelCoord from) -> int32_t {
    for (const auto& d : kNbr) {
      int r = from.row + d[0], c = from.col + d[1];
      if (r < 0 || r >= rows || c < 0 || c >= cols) continue;
      int32_t idx = cell_index[size_t(r) * cols + c];
      if (idx >= 0 && !visited[idx]) return idx;
    }
    return -1;
  };

  for (size_t seed = 0; seed < edges.cells.size(); ++seed) {
    if (visited[seed]) continue;
    visited[seed] = 1;
    std::vector<uint32_t> forward{uint32_t(seed)};
    for (int32_t nxt = next_unvisited(edges.cells[seed]); nxt >= 0;
         nxt = next_unvisited(edges.cells[size_t(nxt)])) {
      visited[nxt] = 1;
      forward.push_back(uint32_t(nxt));
    }
    std::vector<uint32_t> backward;
    for (int32_t nxt = next_unvisited(edges.cells[seed]); nxt >= 0;
         nxt = next_unvisited(edges.cells[size_t(nxt)])) {
      visited[nxt] = 1;
      backward.push_back(uint32_t(nxt));
    }
    CoastPolyline line;
    line.tile = edges.tile;
    line.vertices.reserve(forward.size() + backward.size());
    for (auto it = backward.rbegin(); it != backward.rend(); ++it) {
      line.vertices.push_back(edges.points[*it]);
    }
    for (uint32_t idx : forward) line.vertices.push_back(edges.points[idx]);
    out.push_back(std::move(line));
  }
  return out;
}

GeneratorSet downsample(std::span<const CoastPolyline> polylines,
                        double max_gap_m) {
  if (!(max_gap_m > 0.0)) {
    raise(ErrorCode::invalid_argument, "max_gap_m must be positive");
  }
  GeneratorSet out;
  out.max_gap_m = max_gap_m;
  for (const auto& line : polylines) {
    const auto& v = line.vertices;
    if (v.empty()) continue;
    size_t last_retained = 0;
    out.generators.push_back(Generator::of(v[0], line.tile));
    double acc = 0.0;  // arc length from last retained vertex
    for (size_t i = 1; i < v.size(); ++i) {
      double step = haversine_m(v[i - 1], v[i]);
      if (acc + step > max_gap_m && i - 1 > last_retained) {
        out.generators.push_back(Generator::of(v[i - 1], line.tile));
        last_retained = i - 1;
        acc = step;
      } else {
        acc += step;
      }
      // A single step longer than the gap forces retaining both ends.
      if (acc > max_gap_m && i > last_retained && i + 1 < v.size()) {
        out.generators.push_back(Generator::of(v[i], line.tile));
        last_retained = i;
        acc = 0.0;
      }
    }
    if (v.size() > 1) {
      out.generators.push_back(Generator::of(v.back(), line.tile));
    }
  }
  return out;
}

Router::Router(GeneratorSet gens) : gens_(std::move(gens)) {
  if (gens_.generators.empty()) {
    raise(ErrorCode::invalid_argument, "router needs at least one generator");
  }
  std::vector<PointRad> pts;
  pts.reserve(gens_.generators.size());
  for (const auto& g : gens_.generators) pts.push_back(g.point_rad);
  index_ = CoastTree::build(TileId{0, 0}, std::span<const PointRad>(pts));
  // The tree permutes points; keep the tree-order -> generator-order map so
  // ties can resolve by original generator index.
  gen_of_point_ = index_.input_index();
}

RouteHit Router::nearest_generator(const GeoPoint& q) const {
  double qlat = q.lat_rad(), qlon = q.lon_rad();
  const auto& nodes = index_.nodes();
  const auto& pts = index_.points();

  double best_angle = std::numeric_limits<double>::infinity();
  uint32_t best_gen = 0;

  auto visit = [&](auto&& self, uint32_t ni) -> void {
    const TreeNode& nd = nodes[ni];
    if (nd.is_leaf()) {
      for (uint64_t k = nd.start; k < nd.end; ++k) {
        double a = central_angle_rad(qlat, qlon, pts[k].lat, pts[k].lon);
        uint32_t gen = gen_of_point_[k];
        if (a < best_angle || (a == best_angle && gen < best_gen)) {
          best_angle = a;
          best_gen = gen;
        }
      }
      return;
    }
    const TreeNode& l = nodes[nd.left];
    const TreeNode& r = nodes[nd.right];
    double bl = std::max(
        0.0, central_angle_rad(qlat, qlon, l.center_lat, l.center_lon) - l.radius);
    double br = std::max(
        0.0, central_angle_rad(qlat, qlon, r.center_lat, r.center_lon) - r.radius);
    uint32_t first = nd.left, second = nd.right;
    double bfirst = bl, bsecond = br;
    if (br < bl) {
      std::swap(first, second);
      std::swap(bfirst, bsecond);
    }
    if (bfirst <= best_angle + kPruneSlack) self(self, first);
    if (bsecond <= best_angle + kPruneSlack) self(self, second);
  };
  visit(visit, 0);

  const Generator& g = gens_.generators[best_gen];
  return RouteHit{g.tile, best_gen, best_angle * kEarthRadiusM};
}

TileId Router::route(const GeoPoint& q) const {
  return nearest_generator(q).tile;
}

std::vector<TileId> Router::route_k(const GeoPoint& q, double bound_m) const {
  if (bound_m < 0.0) {
    raise(ErrorCode::invalid_argument, "route_k bound must be >= 0");
  }
  double qlat = q.lat_rad(), qlon = q.lon_rad();
  const auto& nodes = index_.nodes();
  const auto& pts = index_.points();

  std::vector<TileId> tiles;
  auto visit = [&](auto&& self, uint32_t ni) -> void {
    const TreeNode& nd = nodes[ni];
    double to_center =
        central_angle_rad(qlat, qlon, nd.center_lat, nd.center_lon);
    if ((to_center - nd.radius - kPruneSlack) * kEarthRadiusM > bound_m) return;
    if (nd.is_leaf()) {
      for (uint64_t k = nd.start; k < nd.end; ++k) {
        double a = central_angle_rad(qlat, qlon, pts[k].lat, pts[k].lon);
        if (a * kEarthRadiusM <= bound_m) {
          tiles.push_back(gens_.generators[gen_of_point_[k]].tile);
        }
      }
      return;
    }
    self(self, nd.left);
    self(self, nd.right);
  };
  visit(visit, 0);

  std::sort(tiles.begin(), tiles.end());
  tiles.erase(std::unique(tiles.begin(), tiles.end()), tiles.end());
  return tiles;
}

std::vector<uint8_t> serialize_generators(const GeneratorSet& gens) {
  ByteWriter w;
  w.magic("LHVG");
  w.u16(kGeneratorFormatVersion);
  w.u64(gens.generators.size());
  for (const auto& g : gens.generators) {
    w.f64(g.point_rad.lat);
    w.f64(g.point_rad.lon);
    w.i16(g.tile.lat_floor);
    w.i16(g.tile.lon_floor);
    w.u32(0);  // pad
  }
  w.crc_trailer();
  return w.take();
}

GeneratorSet deserialize_generators(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("LHVG", "generator set");
  uint16_t version = r.u16();
  if (version != kGeneratorFormatVersion) {
    raise(ErrorCode::version_mismatch,
          "generator set format version " + std::to_string(version) +
              ", expected " + std::to_string(kGeneratorFormatVersion));
  }
  uint64_t count = r.u64();
  if (bytes.size() != kGenHeaderBytes + count * kGenRecordBytes + 4) {
    raise(ErrorCode::truncated_payload, "generator set: payload size mismatch");
  }
  r.check_crc_trailer("generator set");
  GeneratorSet out;
  out.generators.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    Generator g;
    g.point_rad.lat = r.f64();
    g.point_rad.lon = r.f64();
    g.point = GeoPoint::from_radians(g.point_rad.lat, g.point_rad.lon);
    g.tile.lat_floor = r.i16();
    g.tile.lon_floor = r.i16();
    r.u32();  // pad
    out.generators.push_back(g);
  }
  return out;
}

}  // namespace lighthouse
