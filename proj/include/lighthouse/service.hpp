#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lighthouse/engine.hpp"
#include "lighthouse/synthetic.hpp"

namespace lighthouse {

std::string class_name(ClassLabel c);

// Shortest decimal (never exponent) form that parses back to the same
// double, zero-padded to at least min_frac fractional digits.
std::string format_decimal(double v, int min_frac = 0);

// --- build pipeline -------------------------------------------------------

struct BuildOptions {
  std::string source_dir;
  std::string out_dir;
  int grid = 0;  // 0: from sources, or kDefaultGrid for vector-only input
  double max_gap_m = kDefaultMaxGapM;
  uint32_t leaf_size = kDefaultLeafSize;
  uint32_t chunk_size = kDefaultChunkSize;
  int threads = 0;  // 0 = hardware concurrency
  bool synthetic = false;
  SyntheticWorldSpec synth;
};

// Shared driver: per-tile edge extraction (parallel), polyline chaining,
// down-sampling, dataset write. Rasters that are all water are skipped.
Manifest build_dataset(std::vector<RasterTile> rasters,
                       const std::vector<std::string>& source_tags,
                       const std::string& out_dir, double max_gap_m,
                       uint32_t leaf_size, uint32_t chunk_size, int threads,
                       std::ostream* log);

Manifest build_synthetic_dataset(const SyntheticWorldSpec& spec,
                                 const std::string& out_dir,
                                 double max_gap_m = kDefaultMaxGapM,
                                 int threads = 0, std::ostream* log = nullptr);

// CLI build: stages into a temp dir next to out_dir, renames on success,
// cleans up on failure. Throws on any tile failure.
Manifest run_build(const BuildOptions& opt, std::ostream& log);

// Loads the raster/vector sources under dir (*.pgm + sidecar *.json,
// *.rings) into tiles; grid as in BuildOptions.
std::vector<RasterTile> load_sources(const std::string& dir, int& grid,
                                     std::vector<std::string>& source_tags);

// Plain binary PGM (P5, maxval 255), one byte per cell = class code.
void write_pgm(const std::string& path, const RasterTile& r);
RasterTile read_pgm(const std::string& pgm_path, const std::string& meta_path);

// --- bench ----------------------------------------------------------------

struct BenchOptions {
  size_t queries = 10000;
  uint64_t seed = 7;
  std::string mode = "uniform";  // uniform | coastal
  std::vector<size_t> batch_sizes;
  size_t cache_capacity = 256;
  std::string out_dir;  // when set: latencies.csv, latency_hist.svg
};

struct BenchReport {
  double cold_p50_ms = 0, cold_p90_ms = 0, cold_p99_ms = 0;
  double warm_p50_ms = 0, warm_p90_ms = 0, warm_p99_ms = 0;
  EngineStats stats;
  double peak_rss_mb = 0;
  // batch size -> mean per-query microseconds
  std::vector<std::pair<size_t, double>> batch_table;
};

BenchReport run_bench(const std::string& manifest_path, const BenchOptions& opt,
                      std::ostream& log);

// --- audit ----------------------------------------------------------------

struct AuditOptions {
  size_t points = 1000;
  uint64_t seed = 1;
  size_t cache_capacity = 16;
};

// Engine-vs-oracle comparison, down-sampling constraint audit, and storage
// round-trip audit. Returns 0 iff everything passes; logs the first
// mismatch otherwise.
int run_audit(const std::string& manifest_path, const AuditOptions& opt,
              std::ostream& log);

size_t peak_rss_bytes();

}  // namespace lighthouse
