#pragma once

#include <stdexcept>
#include <string>

namespace lighthouse {

enum class ErrorCode {
  invalid_argument,
  out_of_range,
  not_a_land_tile,
  empty_tree,
  degenerate_ring,
  bad_magic,
  version_mismatch,
  truncated_payload,
  index_out_of_range,
  checksum_mismatch,
  duplicate_tile,
  missing_file,
  dimension_mismatch,
  invalid_capacity,
  io_error,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace lighthouse
