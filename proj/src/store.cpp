#include "lighthouse/store.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "lighthouse/binary_io.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace lighthouse {

namespace {

constexpr size_t kRasterHeaderBytes = 26;

uint32_t div_ceil(uint32_t a, uint32_t b) { return (a + b - 1) / b; }

std::string tree_file_name(TileId t) { return "tree_" + t.name() + ".lhbt"; }
std::string raster_file_name(TileId t) { return "class_" + t.name() + ".lhrc"; }

}  // namespace

const ManifestTile* Manifest::find(TileId id) const {
  auto it = std::lower_bound(
      tiles.begin(), tiles.end(), id,
      [](const ManifestTile& t, TileId v) { return t.tile < v; });
  if (it == tiles.end() || !(it->tile == id)) return nullptr;
  return &*it;
}

std::string Manifest::path_of(const std::string& rel) const {
  return (fs::path(dir) / rel).string();
}

std::vector<uint8_t> encode_chunked_raster(const RasterTile& r,
                                           uint32_t chunk_size) {
  if (r.n_rows < 1 || r.n_cols < 1 ||
      r.classes.size() != size_t(r.n_rows) * size_t(r.n_cols)) {
    raise(ErrorCode::dimension_mismatch, "raster dims do not match cell count");
  }
  if (chunk_size < 1) {
    raise(ErrorCode::invalid_argument, "chunk_size must be >= 1");
  }
  uint32_t rows = uint32_t(r.n_rows), cols = uint32_t(r.n_cols);
  uint32_t chunk_rows = div_ceil(rows, chunk_size);
  uint32_t chunk_cols = div_ceil(cols, chunk_size);
  uint32_t n_chunks = chunk_rows * chunk_cols;

  ByteWriter w;
  w.magic("LHRC");
  w.u16(kRasterFormatVersion);
  w.i16(r.tile.lat_floor);
  w.i16(r.tile.lon_floor);
  w.u32(rows);
  w.u32(cols);
  w.u32(chunk_size);
  w.u32(n_chunks);

  // Offset table: absolute file offset of each chunk payload.
  uint64_t payload_start = kRasterHeaderBytes + uint64_t(n_chunks) * 8;
  uint64_t off = payload_start;
  std::vector<uint64_t> offsets(n_chunks);
  for (uint32_t cr = 0; cr < chunk_rows; ++cr) {
    uint32_t h = std::min(chunk_size, rows - cr * chunk_size);
    for (uint32_t cc = 0; cc < chunk_cols; ++cc) {
      uint32_t wd = std::min(chunk_size, cols - cc * chunk_size);
      offsets[size_t(cr) * chunk_cols + cc] = off;
      off += uint64_t(h) * wd;
    }
  }
  for (uint64_t o : offsets) w.u64(o);

  std::vector<uint32_t> chunk_crcs(n_chunks);
  std::vector<uint8_t> chunk;
  for (uint32_t cr = 0; cr < chunk_rows; ++cr) {
    uint32_t h = std::min(chunk_size, rows - cr * chunk_size);
    for (uint32_t cc = 0; cc < chunk_cols; ++cc) {
      uint32_t wd = std::min(chunk_size, cols - cc * chunk_size);
      chunk.clear();
      for (uint32_t y = 0; y < h; ++y) {
        const uint8_t* src =
            r.classes.data() +
            size_t(cr * chunk_size + y) * cols + size_t(cc) * chunk_size;
        chunk.insert(chunk.end(), src, src + wd);
      }
      chunk_crcs[size_t(cr) * chunk_cols + cc] = crc32_of(chunk.data(), chunk.size());
      w.bytes(chunk.data(), chunk.size());
    }
  }
  for (uint32_t c : chunk_crcs) w.u32(c);
  w.crc_trailer();
  return w.take();
}

ChunkedRasterReader::ChunkedRasterReader(const std::string& path)
    : path_(path), file_(path, std::ios::binary) {
  if (!file_) raise(ErrorCode::missing_file, "cannot open " + path);
  file_.seekg(0, std::ios::end);
  file_size_ = uint64_t(file_.tellg());

  // Header.
  std::vector<uint8_t> head = fetch(0, kRasterHeaderBytes);
  ByteReader r(head.data(), head.size());
  r.expect_magic("LHRC", path);
  uint16_t version = r.u16();
  if (version != kRasterFormatVersion) {
    raise(ErrorCode::version_mismatch,
          path + ": raster format version " + std::to_string(version));
  }
  tile_.lat_floor = r.i16();
  tile_.lon_floor = r.i16();
  uint32_t rows = r.u32();
  uint32_t cols = r.u32();
  chunk_size_ = r.u32();
  uint32_t n_chunks = r.u32();
  if (rows < 1 || cols < 1 || chunk_size_ < 1 || rows > (1u << 20) ||
      cols > (1u << 20)) {
    raise(ErrorCode::index_out_of_range, path + ": implausible raster dims");
  }
  n_rows_ = int(rows);
  n_cols_ = int(cols);
  chunks_per_col_ = div_ceil(rows, chunk_size_);
  chunks_per_row_ = div_ceil(cols, chunk_size_);
  if (n_chunks != chunks_per_col_ * chunks_per_row_) {
    raise(ErrorCode::index_out_of_range, path + ": chunk count mismatch");
  }
  uint64_t expected_size = kRasterHeaderBytes + uint64_t(n_chunks) * 8 +
                           uint64_t(rows) * cols + uint64_t(n_chunks) * 4 + 4;
  if (file_size_ != expected_size) {
    raise(ErrorCode::truncated_payload,
          path + ": file size " + std::to_string(file_size_) + ", expected " +
              std::to_string(expected_size));
  }

  // Offset and checksum tables.
  std::vector<uint8_t> table = fetch(kRasterHeaderBytes, size_t(n_chunks) * 8);
  ByteReader tr(table.data(), table.size());
  offsets_.resize(n_chunks);
  for (auto& o : offsets_) o = tr.u64();
  uint64_t crc_table_at = file_size_ - 4 - uint64_t(n_chunks) * 4;
  std::vector<uint8_t> crcs = fetch(crc_table_at, size_t(n_chunks) * 4);
  ByteReader cr(crcs.data(), crcs.size());
  chunk_crcs_.resize(n_chunks);
  for (auto& c : chunk_crcs_) c = cr.u32();

  // Validate the offset table against the computed layout.
  uint64_t off = kRasterHeaderBytes + uint64_t(n_chunks) * 8;
  for (uint32_t crow = 0; crow < chunks_per_col_; ++crow) {
    for (uint32_t ccol = 0; ccol < chunks_per_row_; ++ccol) {
      size_t idx = size_t(crow) * chunks_per_row_ + ccol;
      if (offsets_[idx] != off) {
        raise(ErrorCode::index_out_of_range, path + ": bad chunk offset table");
      }
      off += chunk_payload_size(crow, ccol);
    }
  }
  metadata_bytes_ = bytes_read_.load();
}

size_t ChunkedRasterReader::chunk_payload_size(uint32_t chunk_row,
                                               uint32_t chunk_col) const {
  uint32_t h = std::min(chunk_size_, uint32_t(n_rows_) - chunk_row * chunk_size_);
  uint32_t w = std::min(chunk_size_, uint32_t(n_cols_) - chunk_col * chunk_size_);
  return size_t(h) * w;
}

std::vector<uint8_t> ChunkedRasterReader::fetch(uint64_t offset,
                                                size_t size) const {
  std::lock_guard<std::mutex> lock(io_mutex_);
  file_.clear();
  file_.seekg(std::streamoff(offset));
  std::vector<uint8_t> buf(size);
  file_.read(reinterpret_cast<char*>(buf.data()), std::streamsize(size));
  if (!file_) raise(ErrorCode::io_error, path_ + ": short read");
  bytes_read_ += size;
  return buf;
}

ClassLabel ChunkedRasterReader::read_class(int row, int col) const {
  if (row < 0 || row >= n_rows_ || col < 0 || col >= n_cols_) {
    raise(ErrorCode::out_of_range,
          "pixel (" + std::to_string(row) + ", " + std::to_string(col) +
              ") outside raster " + std::to_string(n_rows_) + "x" +
              std::to_string(n_cols_));
  }
  uint32_t crow = uint32_t(row) / chunk_size_;
  uint32_t ccol = uint32_t(col) / chunk_size_;
  size_t idx = size_t(crow) * chunks_per_row_ + ccol;
  std::vector<uint8_t> chunk = fetch(offsets_[idx], chunk_payload_size(crow, ccol));
  if (crc32_of(chunk.data(), chunk.size()) != chunk_crcs_[idx]) {
    raise(ErrorCode::checksum_mismatch,
          path_ + ": chunk " + std::to_string(idx) + " checksum mismatch");
  }
  uint32_t w = std::min(chunk_size_, uint32_t(n_cols_) - ccol * chunk_size_);
  uint32_t y = uint32_t(row) - crow * chunk_size_;
  uint32_t x = uint32_t(col) - ccol * chunk_size_;
  return ClassLabel{chunk[size_t(y) * w + x]};
}

RasterTile ChunkedRasterReader::read_all() const {
  std::vector<uint8_t> whole = fetch(0, size_t(file_size_));
  ByteReader r(whole.data(), whole.size());
  r.check_crc_trailer(path_);

  RasterTile out;
  out.tile = tile_;
  out.n_rows = n_rows_;
  out.n_cols = n_cols_;
  out.classes.assign(size_t(n_rows_) * size_t(n_cols_), 0);
  for (uint32_t crow = 0; crow < chunks_per_col_; ++crow) {
    uint32_t h = std::min(chunk_size_, uint32_t(n_rows_) - crow * chunk_size_);
    for (uint32_t ccol = 0; ccol < chunks_per_row_; ++ccol) {
      uint32_t w = std::min(chunk_size_, uint32_t(n_cols_) - ccol * chunk_size_);
      size_t idx = size_t(crow) * chunks_per_row_ + ccol;
      const uint8_t* chunk = whole.data() + offsets_[idx];
      if (crc32_of(chunk, size_t(h) * w) != chunk_crcs_[idx]) {
        raise(ErrorCode::checksum_mismatch,
              path_ + ": chunk " + std::to_string(idx) + " checksum mismatch");
      }
      for (uint32_t y = 0; y < h; ++y) {
        std::copy(chunk + size_t(y) * w, chunk + size_t(y + 1) * w,
                  out.classes.begin() +
                      size_t(crow * chunk_size_ + y) * n_cols_ +
                      size_t(ccol) * chunk_size_);
      }
    }
  }
  return out;
}

ClassLabel read_class(const std::string& raster_file, int row, int col) {
  ChunkedRasterReader reader(raster_file);
  return reader.read_class(row, col);
}

Manifest write_dataset(const std::vector<TileBuildInput>& tiles,
                       const GeneratorSet& gens, const std::string& out_dir,
                       uint32_t chunk_size, uint32_t leaf_size) {
  if (tiles.empty()) {
    raise(ErrorCode::invalid_argument, "write_dataset: no tiles");
  }
  std::vector<const TileBuildInput*> order;
  order.reserve(tiles.size());
  for (const auto& t : tiles) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->raster.tile < b->raster.tile;
  });

  const int n_rows = order.front()->raster.n_rows;
  const int n_cols = order.front()->raster.n_cols;
  for (const auto* t : order) {
    if (t->raster.n_rows != n_rows || t->raster.n_cols != n_cols) {
      raise(ErrorCode::dimension_mismatch,
            "tile " + t->raster.tile.name() + " grid " +
                std::to_string(t->raster.n_rows) + "x" +
                std::to_string(t->raster.n_cols) + " != dataset grid " +
                std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
    if (t->edges.tile != t->raster.tile) {
      raise(ErrorCode::dimension_mismatch,
            "edge set / raster tile mismatch at " + t->raster.tile.name());
    }
  }
  for (size_t i = 1; i < order.size(); ++i) {
    if (order[i]->raster.tile == order[i - 1]->raster.tile) {
      raise(ErrorCode::duplicate_tile,
            "duplicate tile " + order[i]->raster.tile.name());
    }
  }

  fs::create_directories(out_dir);

  Manifest m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.max_gap_m = gens.max_gap_m;
  m.generator_file = "generators.lhvg";
  m.dir = out_dir;

  for (const auto* t : order) {
    TileId id = t->raster.tile;
    CoastTree tree = t->edges.empty()
                         ? CoastTree::empty_marker(id, leaf_size)
                         : CoastTree::build(t->edges, leaf_size);
    std::string tree_rel = tree_file_name(id);
    std::string raster_rel = raster_file_name(id);
    write_file_atomic((fs::path(out_dir) / tree_rel).string(), tree.serialize());
    write_file_atomic((fs::path(out_dir) / raster_rel).string(),
                      encode_chunked_raster(t->raster, chunk_size));
    m.tiles.push_back(
        {id, tree_rel, raster_rel, t->source, uint64_t(t->edges.size())});
  }

  write_file_atomic((fs::path(out_dir) / m.generator_file).string(),
                    serialize_generators(gens));

  ordered_json j;
  j["format_version"] = kManifestVersion;
  j["n_rows"] = n_rows;
  j["n_cols"] = n_cols;
  j["sphere_radius_m"] = m.sphere_radius_m;
  j["max_gap_m"] = m.max_gap_m;
  j["generator_file"] = m.generator_file;
  ordered_json jt = ordered_json::array();
  for (const auto& t : m.tiles) {
    ordered_json e;
    e["lat_floor"] = t.tile.lat_floor;
    e["lon_floor"] = t.tile.lon_floor;
    e["tree"] = t.tree_file;
    e["raster"] = t.raster_file;
    e["source"] = t.source;
    e["edge_points"] = t.edge_points;
    jt.push_back(e);
  }
  j["tiles"] = jt;
  write_file_atomic((fs::path(out_dir) / kManifestFileName).string(),
                    j.dump(2) + "\n");
  return m;
}

Manifest open_manifest(const std::string& path) {
  if (!fs::exists(path)) {
    raise(ErrorCode::missing_file, "manifest not found: " + path);
  }
  std::vector<uint8_t> bytes = read_file(path);
  ordered_json j;
  try {
    j = ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::io_error, path + ": manifest parse error: " + e.what());
  }

  Manifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kManifestVersion) {
      raise(ErrorCode::version_mismatch,
            path + ": manifest version " + std::to_string(m.format_version) +
                ", expected " + std::to_string(kManifestVersion));
    }
    m.n_rows = j.at("n_rows").get<int>();
    m.n_cols = j.at("n_cols").get<int>();
    m.sphere_radius_m = j.at("sphere_radius_m").get<double>();
    m.max_gap_m = j.at("max_gap_m").get<double>();
    m.generator_file = j.at("generator_file").get<std::string>();
    for (const auto& e : j.at("tiles")) {
      ManifestTile t;
      t.tile.lat_floor = int16_t(e.at("lat_floor").get<int>());
      t.tile.lon_floor = int16_t(e.at("lon_floor").get<int>());
      t.tree_file = e.at("tree").get<std::string>();
      t.raster_file = e.at("raster").get<std::string>();
      t.source = e.at("source").get<std::string>();
      t.edge_points = e.at("edge_points").get<uint64_t>();
      m.tiles.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::io_error, path + ": manifest field error: " + e.what());
  }

  std::set<TileId> seen;
  for (const auto& t : m.tiles) {
    if (!seen.insert(t.tile).second) {
      raise(ErrorCode::duplicate_tile,
            path + ": duplicate tile " + t.tile.name());
    }
  }
  std::sort(m.tiles.begin(), m.tiles.end(),
            [](const ManifestTile& a, const ManifestTile& b) {
              return a.tile < b.tile;
            });
  m.dir = fs::path(path).parent_path().string();
  if (m.dir.empty()) m.dir = ".";
  for (const auto& t : m.tiles) {
    for (const std::string& rel : {t.tree_file, t.raster_file}) {
      std::string p = m.path_of(rel);
      if (!fs::exists(p)) {
        raise(ErrorCode::missing_file, "missing dataset file: " + p);
      }
    }
  }
  if (!fs::exists(m.path_of(m.generator_file))) {
    raise(ErrorCode::missing_file,
          "missing dataset file: " + m.path_of(m.generator_file));
  }
  return m;
}

}  // namespace lighthouse
