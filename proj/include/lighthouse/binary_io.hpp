#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "lighthouse/errors.hpp"

namespace lighthouse {

uint32_t crc32_of(const uint8_t* data, size_t size);
uint32_t crc32_of(std::span<const uint8_t> bytes);

// Little-endian append-only buffer for the on-disk formats.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) { append(v); }
  void u32(uint32_t v) { append(v); }
  void u64(uint64_t v) { append(v); }
  void i16(int16_t v) { append(uint16_t(v)); }
  void f64(double v) { append(std::bit_cast<uint64_t>(v)); }
  void bytes(const void* data, size_t size) {
    const uint8_t* p = static_cast<const uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + size);
  }
  void magic(const char tag[4]) { bytes(tag, 4); }

  // Appends the crc32 of everything written so far.
  void crc_trailer() { u32(crc32_of(buf_.data(), buf_.size())); }

  size_t size() const { return buf_.size(); }
  const std::vector<uint8_t>& data() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  template <typename T>
  void append(T v) {
    for (size_t i = 0; i < sizeof(T); ++i) {
      buf_.push_back(uint8_t(v >> (8 * i)));
    }
  }

  std::vector<uint8_t> buf_;
};

// Bounds-checked little-endian reader; throws truncated_payload on any read
// past the end.
class ByteReader {
 public:
  ByteReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}
  explicit ByteReader(std::span<const uint8_t> bytes)
      : data_(bytes.data()), size_(bytes.size()) {}

  uint8_t u8() { return take<uint8_t>(); }
  uint16_t u16() { return take<uint16_t>(); }
  uint32_t u32() { return take<uint32_t>(); }
  uint64_t u64() { return take<uint64_t>(); }
  int16_t i16() { return int16_t(take<uint16_t>()); }
  double f64() { return std::bit_cast<double>(take<uint64_t>()); }

  void expect_magic(const char tag[4], const std::string& what);

  // Verifies that the last 4 bytes hold the crc32 of everything before them
  // and restricts further reads to the checked region.
  void check_crc_trailer(const std::string& what);

  size_t pos() const { return pos_; }
  size_t remaining() const { return size_ - pos_; }
  const uint8_t* cursor() const { return data_ + pos_; }
  void skip(size_t n);

 private:
  template <typename T>
  T take() {
    if (size_ - pos_ < sizeof(T)) {
      raise(ErrorCode::truncated_payload, "payload truncated");
    }
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      v |= T(data_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }

  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

std::vector<uint8_t> read_file(const std::string& path);

// Writes via a temp file in the same directory followed by rename.
void write_file_atomic(const std::string& path,
                       std::span<const uint8_t> bytes);
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace lighthouse
