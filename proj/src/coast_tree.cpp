#include "lighthouse/coast_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "lighthouse/binary_io.hpp"

namespace lighthouse {

namespace {

// Pruning slack, radians. A child is skipped only when its lower bound beats
// the current best by more than the floating-point error of the bound
// computation, so the search agrees with a linear scan bit for bit.
constexpr double kPruneSlack = 1e-12;

constexpr size_t kHeaderBytes = 32;
constexpr size_t kPointBytes = 16;
constexpr size_t kNodeBytes = 48;
constexpr uint64_t kMaxCount = 0xFFFFFFFEull;  // indices must fit u32

UnitVec3 unit_of(const PointRad& p) {
  double c = std::cos(p.lat);
  return UnitVec3(c * std::cos(p.lon), c * std::sin(p.lon), std::sin(p.lat));
}

struct Builder {
  std::span<const PointRad> pts;
  std::vector<UnitVec3> unit;
  std::vector<uint32_t> perm;
  std::vector<TreeNode> nodes;
  uint32_t leaf_size;

  uint32_t build_node(uint32_t lo, uint32_t hi) {
    uint32_t idx = uint32_t(nodes.size());
    nodes.emplace_back();

    PointRad center;
    if (hi - lo == 1) {
      center = pts[perm[lo]];  // exact point, radius exactly 0
    } else {
      UnitVec3 sum = UnitVec3::Zero();
      for (uint32_t i = lo; i < hi; ++i) sum += unit[perm[i]];
      double norm = sum.norm();
      UnitVec3 c = norm > 1e-12 ? UnitVec3(sum / norm) : unit[perm[lo]];
      center.lat = std::atan2(c.z(), std::hypot(c.x(), c.y()));
      center.lon = std::atan2(c.y(), c.x());
    }
    double radius = 0.0;
    for (uint32_t i = lo; i < hi; ++i) {
      const PointRad& p = pts[perm[i]];
      radius = std::max(radius,
                        central_angle_rad(center.lat, center.lon, p.lat, p.lon));
    }

    TreeNode& nd = nodes[idx];
    nd.center_lat = center.lat;
    nd.center_lon = center.lon;
    nd.radius = radius;
    nd.start = lo;
    nd.end = hi;

    if (hi - lo <= leaf_size) return idx;

    // Split along the wider of the two tangent-plane axes at the centroid.
    double sphi = std::sin(center.lat), cphi = std::cos(center.lat);
    double slam = std::sin(center.lon), clam = std::cos(center.lon);
    UnitVec3 east(-slam, clam, 0.0);
    UnitVec3 north(-sphi * clam, -sphi * slam, cphi);

    std::vector<std::pair<double, uint32_t>> keyed(hi - lo);
    double min_e = 0, max_e = 0, min_n = 0, max_n = 0;
    for (uint32_t i = lo; i < hi; ++i) {
      const UnitVec3& v = unit[perm[i]];
      double e = east.dot(v), n = north.dot(v);
      if (i == lo) {
        min_e = max_e = e;
        min_n = max_n = n;
      } else {
        min_e = std::min(min_e, e), max_e = std::max(max_e, e);
        min_n = std::min(min_n, n), max_n = std::max(max_n, n);
      }
      keyed[i - lo] = {e, perm[i]};  // provisional: east axis
    }
    if (max_n - min_n > max_e - min_e) {
      for (uint32_t i = lo; i < hi; ++i) {
        keyed[i - lo].first = north.dot(unit[perm[i]]);
      }
    }
    // Median split; (key, input index) is a total order, so the layout is
    // identical on every platform.
    std::sort(keyed.begin(), keyed.end());
    for (uint32_t i = lo; i < hi; ++i) perm[i] = keyed[i - lo].second;

    uint32_t mid = lo + (hi - lo) / 2;
    uint32_t left = build_node(lo, mid);
    uint32_t right = build_node(mid, hi);
    nodes[idx].left = left;
    nodes[idx].right = right;
    return idx;
  }
};

}  // namespace

CoastTree CoastTree::build(const EdgeSet& edges, uint32_t leaf_size) {
  return build(edges.tile, edges.points, leaf_size);
}

CoastTree CoastTree::build(TileId tile, std::span<const GeoPoint> points,
                           uint32_t leaf_size) {
  std::vector<PointRad> rad(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    rad[i] = {points[i].lat_rad(), points[i].lon_rad()};
  }
  return build(tile, std::span<const PointRad>(rad), leaf_size);
}

CoastTree CoastTree::build(TileId tile, std::span<const PointRad> points,
                           uint32_t leaf_size) {
  if (points.empty()) {
    raise(ErrorCode::empty_tree,
          "cannot build a tree over zero points (tile " + tile.name() + ")");
  }
  if (leaf_size < 1) {
    raise(ErrorCode::invalid_argument, "leaf_size must be >= 1");
  }
  if (points.size() > kMaxCount) {
    raise(ErrorCode::invalid_argument, "too many points for one tree");
  }

  Builder b;
  b.pts = points;
  b.unit.reserve(points.size());
  for (const auto& p : points) b.unit.push_back(unit_of(p));
  b.perm.resize(points.size());
  std::iota(b.perm.begin(), b.perm.end(), 0u);
  b.leaf_size = leaf_size;
  b.nodes.reserve(2 * points.size() / std::max(1u, leaf_size) + 2);
  b.build_node(0, uint32_t(points.size()));

  CoastTree t;
  t.tile_ = tile;
  t.leaf_size_ = leaf_size;
  t.points_.resize(points.size());
  for (size_t i = 0; i < points.size(); ++i) t.points_[i] = points[b.perm[i]];
  t.nodes_ = std::move(b.nodes);
  t.input_index_ = std::move(b.perm);
  return t;
}

CoastTree CoastTree::empty_marker(TileId tile, uint32_t leaf_size) {
  CoastTree t;
  t.tile_ = tile;
  t.leaf_size_ = leaf_size;
  return t;
}

GeoPoint CoastTree::point_geo(uint32_t index) const {
  const PointRad& p = points_.at(index);
  return GeoPoint::from_radians(p.lat, p.lon);
}

RawHit CoastTree::nearest_raw(double qlat_rad, double qlon_rad) const {
  if (empty()) {
    raise(ErrorCode::empty_tree, "nearest() on empty tree " + tile_.name());
  }
  RawHit best{std::numeric_limits<double>::infinity(), 0};

  // Depth-first branch and bound, nearer child first.
  auto angle_to = [&](const TreeNode& nd) {
    return central_angle_rad(qlat_rad, qlon_rad, nd.center_lat, nd.center_lon);
  };
  auto visit = [&](auto&& self, uint32_t ni) -> void {
    const TreeNode& nd = nodes_[ni];
    if (nd.is_leaf()) {
      for (uint64_t k = nd.start; k < nd.end; ++k) {
        double a = central_angle_rad(qlat_rad, qlon_rad, points_[k].lat,
                                     points_[k].lon);
        if (a < best.angle || (a == best.angle && uint32_t(k) < best.index)) {
          best = {a, uint32_t(k)};
        }
      }
      return;
    }
    const TreeNode& l = nodes_[nd.left];
    const TreeNode& r = nodes_[nd.right];
    double bl = std::max(0.0, angle_to(l) - l.radius);
    double br = std::max(0.0, angle_to(r) - r.radius);
    uint32_t first = nd.left, second = nd.right;
    double bfirst = bl, bsecond = br;
    if (br < bl) {
      std::swap(first, second);
      std::swap(bfirst, bsecond);
    }
    if (bfirst <= best.angle + kPruneSlack) self(self, first);
    if (bsecond <= best.angle + kPruneSlack) self(self, second);
  };
  visit(visit, 0);
  return best;
}

NearestHit CoastTree::nearest(const GeoPoint& q) const {
  RawHit raw = nearest_raw(q.lat_rad(), q.lon_rad());
  NearestHit hit;
  hit.index = raw.index;
  hit.point = point_geo(raw.index);
  hit.distance_m = haversine_m(q, hit.point);
  return hit;
}

std::vector<uint8_t> CoastTree::serialize() const {
  ByteWriter w;
  w.magic("LHBT");
  w.u16(kTreeFormatVersion);
  w.u16(0);  // reserved
  w.i16(tile_.lat_floor);
  w.i16(tile_.lon_floor);
  w.u64(points_.size());
  w.u64(nodes_.size());
  w.u32(leaf_size_);
  for (const auto& p : points_) {
    w.f64(p.lat);
    w.f64(p.lon);
  }
  for (const auto& nd : nodes_) {
    w.f64(nd.center_lat);
    w.f64(nd.center_lon);
    w.f64(nd.radius);
    w.u64(nd.start);
    w.u64(nd.end);
    w.u32(nd.left);
    w.u32(nd.right);
  }
  w.crc_trailer();
  return w.take();
}

CoastTree CoastTree::deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("LHBT", "ball tree");
  uint16_t version = r.u16();
  if (version != kTreeFormatVersion) {
    raise(ErrorCode::version_mismatch,
          "ball tree format version " + std::to_string(version) +
              ", expected " + std::to_string(kTreeFormatVersion));
  }
  r.u16();  // reserved
  CoastTree t;
  t.tile_.lat_floor = r.i16();
  t.tile_.lon_floor = r.i16();
  uint64_t n_points = r.u64();
  uint64_t n_nodes = r.u64();
  t.leaf_size_ = r.u32();
  if (n_points > kMaxCount || n_nodes > kMaxCount) {
    raise(ErrorCode::index_out_of_range, "ball tree: counts exceed format limits");
  }
  if (t.leaf_size_ < 1) {
    raise(ErrorCode::index_out_of_range, "ball tree: leaf_size 0");
  }
  if ((n_points == 0) != (n_nodes == 0)) {
    raise(ErrorCode::index_out_of_range,
          "ball tree: inconsistent empty-tree marker");
  }
  if (bytes.size() !=
      kHeaderBytes + n_points * kPointBytes + n_nodes * kNodeBytes + 4) {
    raise(ErrorCode::truncated_payload, "ball tree: payload size mismatch");
  }
  r.check_crc_trailer("ball tree");
  t.points_.resize(n_points);
  for (auto& p : t.points_) {
    p.lat = r.f64();
    p.lon = r.f64();
  }
  t.nodes_.resize(n_nodes);
  for (size_t i = 0; i < n_nodes; ++i) {
    TreeNode& nd = t.nodes_[i];
    nd.center_lat = r.f64();
    nd.center_lon = r.f64();
    nd.radius = r.f64();
    nd.start = r.u64();
    nd.end = r.u64();
    nd.left = r.u32();
    nd.right = r.u32();
    if (nd.start > nd.end || nd.end > n_points) {
      raise(ErrorCode::index_out_of_range, "ball tree: node range out of bounds");
    }
    bool left_leaf = nd.left == kNoChild, right_leaf = nd.right == kNoChild;
    if (left_leaf != right_leaf) {
      raise(ErrorCode::index_out_of_range, "ball tree: half-leaf node");
    }
    // Children follow their parent, which also rules out cycles.
    if (!left_leaf && (nd.left <= i || nd.right <= i || nd.left >= n_nodes ||
                       nd.right >= n_nodes)) {
      raise(ErrorCode::index_out_of_range, "ball tree: child index out of order");
    }
  }
  return t;
}

}  // namespace lighthouse
