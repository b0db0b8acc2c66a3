#include "komohe/error.hpp"

namespace komohe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidTerm:
      return "invalid_term";
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kInvalidMapping:
      return "invalid_mapping";
    case ErrorCode::kNotFound:
      return "not_found";
    case ErrorCode::kConflict:
      return "conflict";
    case ErrorCode::kFormat:
      return "format_error";
    case ErrorCode::kParse:
      return "parse_error";
  }
  return "error";
}

}  // namespace komohe
