#include "lighthouse/errors.hpp"

namespace lighthouse {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::not_a_land_tile: return "not_a_land_tile";
    case ErrorCode::empty_tree: return "empty_tree";
    case ErrorCode::degenerate_ring: return "degenerate_ring";
    case ErrorCode::bad_magic: return "bad_magic";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::truncated_payload: return "truncated_payload";
    case ErrorCode::index_out_of_range: return "index_out_of_range";
    case ErrorCode::checksum_mismatch: return "checksum_mismatch";
    case ErrorCode::duplicate_tile: return "duplicate_tile";
    case ErrorCode::missing_file: return "missing_file";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_capacity: return "invalid_capacity";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace lighthouse
