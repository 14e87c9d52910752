#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "lighthouse/coast_tree.hpp"
#include "lighthouse/raster.hpp"
#include "lighthouse/router.hpp"

namespace lighthouse {

inline constexpr uint16_t kRasterFormatVersion = 1;
inline constexpr uint32_t kDefaultChunkSize = 256;  // ~64 KiB per chunk
inline constexpr int kManifestVersion = 1;
inline constexpr const char* kManifestFileName = "lighthouse.manifest";

struct ManifestTile {
  TileId tile;
  std::string tree_file;    // relative to the dataset directory
  std::string raster_file;  // relative to the dataset directory
  std::string source;       // e.g. "esa" | "osm" | "synthetic"
  uint64_t edge_points = 0;
};

struct Manifest {
  int format_version = kManifestVersion;
  int n_rows = 0;
  int n_cols = 0;
  double sphere_radius_m = kEarthRadiusM;
  double max_gap_m = kDefaultMaxGapM;
  std::string generator_file;
  std::vector<ManifestTile> tiles;  // sorted by TileId
  std::string dir;  // dataset directory, set when opened/written

  const ManifestTile* find(TileId id) const;  // binary search, thread-safe
  std::string path_of(const std::string& rel) const;
};

// Parses and validates the manifest; referenced files must exist but their
// contents are not read here (tiles load lazily).
Manifest open_manifest(const std::string& path);

// One tile's build products plus its provenance tag.
struct TileBuildInput {
  RasterTile raster;
  EdgeSet edges;
  std::string source = "synthetic";
};

// Writes trees, chunked rasters, the generator set, and the manifest into
// out_dir. All writes are atomic; identical inputs produce byte-identical
// files. Returns the manifest (with dir set).
Manifest write_dataset(const std::vector<TileBuildInput>& tiles,
                       const GeneratorSet& gens, const std::string& out_dir,
                       uint32_t chunk_size = kDefaultChunkSize,
                       uint32_t leaf_size = kDefaultLeafSize);

std::vector<uint8_t> encode_chunked_raster(const RasterTile& r,
                                           uint32_t chunk_size = kDefaultChunkSize);

// Random-access reader over the chunked raster format. Opening reads only
// the fixed header plus the offset/checksum tables; each read_class call
// touches exactly one chunk and verifies its checksum.
class ChunkedRasterReader {
 public:
  explicit ChunkedRasterReader(const std::string& path);

  TileId tile() const { return tile_; }
  int n_rows() const { return n_rows_; }
  int n_cols() const { return n_cols_; }
  uint32_t chunk_size() const { return chunk_size_; }

  ClassLabel read_class(int row, int col) const;

  // Total bytes pulled from disk, including the open-time metadata;
  // the locality tests hook in here.
  uint64_t bytes_read() const { return bytes_read_.load(); }
  uint64_t metadata_bytes() const { return metadata_bytes_; }

  // Full sequential read (audits and round-trip checks); verifies every
  // chunk checksum and the trailing file checksum.
  RasterTile read_all() const;

 private:
  std::vector<uint8_t> fetch(uint64_t offset, size_t size) const;
  size_t chunk_payload_size(uint32_t chunk_row, uint32_t chunk_col) const;

  std::string path_;
  mutable std::ifstream file_;
  mutable std::mutex io_mutex_;
  mutable std::atomic<uint64_t> bytes_read_{0};
  uint64_t metadata_bytes_ = 0;
  uint64_t file_size_ = 0;

  TileId tile_;
  int n_rows_ = 0;
  int n_cols_ = 0;
  uint32_t chunk_size_ = 0;
  uint32_t chunks_per_row_ = 0;  // chunk-grid columns
  uint32_t chunks_per_col_ = 0;  // chunk-grid rows
  std::vector<uint64_t> offsets_;
  std::vector<uint32_t> chunk_crcs_;
};

// Single-cell read through a throwaway reader, per the spec's operation
// shape; long-lived callers hold a ChunkedRasterReader instead.
ClassLabel read_class(const std::string& raster_file, int row, int col);

}  // namespace lighthouse
