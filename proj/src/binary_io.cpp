#include "lighthouse/binary_io.hpp"

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace lighthouse {

uint32_t crc32_of(const uint8_t* data, size_t size) {
  return uint32_t(::crc32(0L, data, uInt(size)));
}

uint32_t crc32_of(std::span<const uint8_t> bytes) {
  return crc32_of(bytes.data(), bytes.size());
}

void ByteReader::expect_magic(const char tag[4], const std::string& what) {
  if (size_ - pos_ < 4) {
    raise(ErrorCode::truncated_payload, what + ": payload truncated");
  }
  if (std::memcmp(data_ + pos_, tag, 4) != 0) {
    raise(ErrorCode::bad_magic, what + ": bad magic");
  }
  pos_ += 4;
}

void ByteReader::check_crc_trailer(const std::string& what) {
  if (size_ < pos_ + 4) {
    raise(ErrorCode::truncated_payload, what + ": payload truncated");
  }
  size_t body = size_ - 4;
  uint32_t stored = 0;
  for (size_t i = 0; i < 4; ++i) stored |= uint32_t(data_[body + i]) << (8 * i);
  if (crc32_of(data_, body) != stored) {
    raise(ErrorCode::checksum_mismatch, what + ": checksum mismatch");
  }
  size_ = body;
}

void ByteReader::skip(size_t n) {
  if (size_ - pos_ < n) {
    raise(ErrorCode::truncated_payload, "payload truncated");
  }
  pos_ += n;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::missing_file, "cannot open " + path);
  in.seekg(0, std::ios::end);
  std::vector<uint8_t> bytes(size_t(in.tellg()));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!in) raise(ErrorCode::io_error, "short read on " + path);
  return bytes;
}

void write_file_atomic(const std::string& path,
                       std::span<const uint8_t> bytes) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::io_error, "cannot create " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
    if (!out) raise(ErrorCode::io_error, "write failed on " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(ErrorCode::io_error, "rename to " + path + ": " + ec.message());
}

void write_file_atomic(const std::string& path, const std::string& text) {
  write_file_atomic(path, std::span<const uint8_t>(
                              reinterpret_cast<const uint8_t*>(text.data()),
                              text.size()));
}

}  // namespace lighthouse
