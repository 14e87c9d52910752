#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>

#include "lighthouse/store.hpp"

namespace lighthouse {

inline constexpr size_t kUnboundedCache = size_t(-1);

struct QueryResult {
  double distance_m = 0.0;  // to the nearest coastal point, exact
  GeoPoint nearest;
  ClassLabel class_label;  // class at the query cell; water on the high seas
  TileId tile;             // tile that supplied the nearest point
  uint32_t nearest_index = 0;  // point index within that tile's tree
};

struct EngineStats {
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t evictions = 0;
  uint64_t queries = 0;
};

// One tile resident in the cache: the ball tree plus an open raster handle,
// loaded and evicted together. Immutable once loaded; shared_ptr keeps
// in-flight queries valid across evictions.
struct LoadedTile {
  CoastTree tree;
  std::unique_ptr<ChunkedRasterReader> raster;
};

class TileCache {
 public:
  TileCache(const Manifest& manifest, size_t capacity);

  std::shared_ptr<const LoadedTile> get(TileId id);

  size_t resident() const;
  uint64_t hits() const { return hits_.load(); }
  uint64_t misses() const { return misses_.load(); }
  uint64_t evictions() const { return evictions_.load(); }

 private:
  std::shared_ptr<const LoadedTile> load(TileId id) const;

  const Manifest& manifest_;
  size_t capacity_;

  mutable std::mutex mu_;
  // Front = most recently used.
  std::list<std::pair<TileId, std::shared_ptr<const LoadedTile>>> lru_;
  std::unordered_map<TileId, decltype(lru_)::iterator, TileIdHash> map_;
  // Single-flight: concurrent misses on one tile share one load.
  std::unordered_map<TileId, std::shared_future<std::shared_ptr<const LoadedTile>>,
                     TileIdHash>
      inflight_;

  std::atomic<uint64_t> hits_{0};
  std::atomic<uint64_t> misses_{0};
  std::atomic<uint64_t> evictions_{0};
};

// The query runtime: Voronoi routing for uncovered points, per-tile ball
// tree lookups through the LRU cache, and a bounded cross-tile expansion
// that makes results globally exact. Safe for concurrent callers.
class Engine {
 public:
  Engine(const std::string& manifest_path, size_t cache_capacity);

  QueryResult query(const GeoPoint& q) const;

  // Element-wise identical to sequential query() calls; reorders by tile
  // internally to improve cache locality.
  std::vector<QueryResult> query_batch(std::span<const GeoPoint> qs) const;

  EngineStats stats() const;
  size_t cached_tiles() const { return cache_.resident(); }

  const Manifest& manifest() const { return manifest_; }
  const Router& router() const { return *router_; }

 private:
  struct Best;
  void query_tile(TileId id, double qlat, double qlon, Best& best,
                  std::shared_ptr<const LoadedTile>* keep) const;

  Manifest manifest_;
  std::unique_ptr<Router> router_;
  mutable TileCache cache_;
  mutable std::atomic<uint64_t> queries_{0};
};

}  // namespace lighthouse
