#include "lighthouse/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lighthouse/binary_io.hpp"

namespace lighthouse {

namespace {

// Conservative lower bound on the distance from q (inside tile t) to the
// neighbor tile offset by (dlat, dlon) in whole degrees. Reaching a
// neighbor means crossing each boundary the offset implies, so the max of
// the per-boundary bounds is itself a lower bound.
double neighbor_lower_bound_m(const GeoPoint& q, TileId t, int dlat, int dlon) {
  double bound = 0.0;
  if (dlat > 0) bound = std::max(bound, deg2rad((t.lat_floor + 1.0) - q.lat));
  if (dlat < 0) bound = std::max(bound, deg2rad(q.lat - t.lat_floor));
  if (dlon != 0) {
    double dl = dlon > 0 ? (t.lon_floor + 1.0) - q.lon : q.lon - t.lon_floor;
    double phi_max = deg2rad(std::max(std::abs(double(t.lat_floor)),
                                      std::abs(double(t.lat_floor) + 1.0)));
    bound = std::max(bound, std::sin(deg2rad(dl)) * std::cos(phi_max));
  }
  return std::max(0.0, bound) * kEarthRadiusM;
}

}  // namespace

TileCache::TileCache(const Manifest& manifest, size_t capacity)
    : manifest_(manifest), capacity_(capacity) {
  if (capacity < 1) {
    raise(ErrorCode::invalid_capacity, "cache capacity must be >= 1");
  }
}

std::shared_ptr<const LoadedTile> TileCache::load(TileId id) const {
  const ManifestTile* entry = manifest_.find(id);
  if (!entry) {
    raise(ErrorCode::missing_file, "tile " + id.name() + " not in manifest");
  }
  auto tile = std::make_shared<LoadedTile>();
  std::vector<uint8_t> bytes = read_file(manifest_.path_of(entry->tree_file));
  tile->tree = CoastTree::deserialize(bytes);
  if (!(tile->tree.tile() == id)) {
    raise(ErrorCode::invalid_argument,
          entry->tree_file + ": tile header mismatch");
  }
  tile->raster = std::make_unique<ChunkedRasterReader>(
      manifest_.path_of(entry->raster_file));
  return tile;
}

std::shared_ptr<const LoadedTile> TileCache::get(TileId id) {
  std::unique_lock<std::mutex> lock(mu_);
  auto it = map_.find(id);
  if (it != map_.end()) {
    hits_++;
    lru_.splice(lru_.begin(), lru_, it->second);  // touch
    return it->second->second;
  }
  misses_++;
  auto inflight = inflight_.find(id);
  if (inflight != inflight_.end()) {
    auto fut = inflight->second;
    lock.unlock();
    return fut.get();
  }
  std::promise<std::shared_ptr<const LoadedTile>> promise;
  inflight_.emplace(id, promise.get_future().share());
  lock.unlock();

  std::shared_ptr<const LoadedTile> loaded;
  try {
    loaded = load(id);
  } catch (...) {
    std::lock_guard<std::mutex> relock(mu_);
    inflight_.erase(id);
    promise.set_exception(std::current_exception());
    throw;
  }
  promise.set_value(loaded);

  std::lock_guard<std::mutex> relock(mu_);
  inflight_.erase(id);
  if (map_.find(id) == map_.end()) {
    lru_.emplace_front(id, loaded);
    map_.emplace(id, lru_.begin());
    while (lru_.size() > capacity_) {
      map_.erase(lru_.back().first);
      lru_.pop_back();
      evictions_++;
    }
  }
  return loaded;
}

size_t TileCache::resident() const {
  std::lock_guard<std::mutex> lock(mu_);
  return lru_.size();
}

Engine::Engine(const std::string& manifest_path, size_t cache_capacity)
    : manifest_(open_manifest(manifest_path)), cache_(manifest_, cache_capacity) {
  if (manifest_.sphere_radius_m != kEarthRadiusM) {
    raise(ErrorCode::version_mismatch,
          "dataset sphere radius " + std::to_string(manifest_.sphere_radius_m) +
              " does not match engine constant");
  }
  std::vector<uint8_t> bytes =
      read_file(manifest_.path_of(manifest_.generator_file));
  GeneratorSet gens = deserialize_generators(bytes);
  gens.max_gap_m = manifest_.max_gap_m;
  router_ = std::make_unique<Router>(std::move(gens));
}

struct Engine::Best {
  double angle = std::numeric_limits<double>::infinity();
  TileId tile;
  uint32_t index = 0;
  bool found = false;
  std::shared_ptr<const LoadedTile> winner;
};

void Engine::query_tile(TileId id, double qlat, double qlon, Best& best,
                        std::shared_ptr<const LoadedTile>* keep) const {
  auto tile = cache_.get(id);
  if (keep) *keep = tile;
  if (tile->tree.empty()) return;
  RawHit hit = tile->tree.nearest_raw(qlat, qlon);
  if (!best.found || hit.angle < best.angle ||
      (hit.angle == best.angle &&
       std::pair(id, hit.index) < std::pair(best.tile, best.index))) {
    best = {hit.angle, id, hit.index, true, std::move(tile)};
  }
}

QueryResult Engine::query(const GeoPoint& q) const {
  queries_++;
  const double qlat = q.lat_rad(), qlon = q.lon_rad();

  TileId own = tile_of(q);
  const bool covered = manifest_.find(own) != nullptr;

  // Step 1-2: the candidate tile and its nearest hit.
  TileId cand = covered ? own : router_->route(q);
  Best best;
  std::shared_ptr<const LoadedTile> own_tile;
  query_tile(cand, qlat, qlon, best, covered ? &own_tile : nullptr);

  // Step 3: expansion. d is the best distance so far; an empty candidate
  // tree falls back to the nearest-generator bound.
  double d_m;
  if (best.found) {
    d_m = best.angle * kEarthRadiusM;
  } else {
    d_m = router_->nearest_generator(q).distance_m + manifest_.max_gap_m;
  }

  std::vector<TileId> expand = router_->route_k(q, d_m + manifest_.max_gap_m);
  if (covered) {
    for (int dlat = -1; dlat <= 1; ++dlat) {
      for (int dlon = -1; dlon <= 1; ++dlon) {
        if (dlat == 0 && dlon == 0) continue;
        int nlat = own.lat_floor + dlat;
        if (nlat < -90 || nlat > 89) continue;
        int nlon = own.lon_floor + dlon;
        if (nlon < -180) nlon += 360;
        if (nlon >= 180) nlon -= 360;
        TileId nb{int16_t(nlat), int16_t(nlon)};
        if (!manifest_.find(nb)) continue;
        if (neighbor_lower_bound_m(q, own, dlat, dlon) < d_m) {
          expand.push_back(nb);
        }
      }
    }
  }
  std::sort(expand.begin(), expand.end());
  expand.erase(std::unique(expand.begin(), expand.end()), expand.end());
  for (TileId id : expand) {
    if (id == cand) continue;
    query_tile(id, qlat, qlon, best, nullptr);
  }

  // Step 4: class at the query cell; water outside every tile.
  QueryResult out;
  if (covered) {
    int row = int(std::floor((own.lat_floor + 1.0 - q.lat) * manifest_.n_rows));
    int col = int(std::floor((q.lon - own.lon_floor) * manifest_.n_cols));
    row = std::clamp(row, 0, manifest_.n_rows - 1);
    col = std::clamp(col, 0, manifest_.n_cols - 1);
    out.class_label = own_tile->raster->read_class(row, col);
  } else {
    out.class_label = ClassLabel{kWaterClass};
  }

  // A dataset always has at least one nonempty tree (its generators exist),
  // so the expansion cannot come back empty.
  if (!best.found) {
    raise(ErrorCode::empty_tree, "dataset has no coastal points");
  }
  out.tile = best.tile;
  out.nearest_index = best.index;
  out.nearest = best.winner->tree.point_geo(best.index);
  out.distance_m = haversine_m(q, out.nearest);
  return out;
}

std::vector<QueryResult> Engine::query_batch(std::span<const GeoPoint> qs) const {
  if (qs.empty()) {
    raise(ErrorCode::invalid_argument, "empty batch");
  }
  std::vector<size_t> order(qs.size());
  for (size_t i = 0; i < qs.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return tile_of(qs[a]) < tile_of(qs[b]);
  });
  std::vector<QueryResult> results(qs.size());
  for (size_t i : order) results[i] = query(qs[i]);
  return results;
}

EngineStats Engine::stats() const {
  return EngineStats{cache_.hits(), cache_.misses(), cache_.evictions(),
                     queries_.load()};
}

}  // namespace lighthouse
