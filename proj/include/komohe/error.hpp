#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace komohe {

enum class ErrorCode {
  kInvalidTerm,
  kInvalidArgument,
  kInvalidMapping,
  kNotFound,
  kConflict,
  kFormat,
  kParse,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by every module. The code drives CLI exit status and
/// HTTP status mapping; the message is meant for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Query syntax error. position is a byte offset into the input; it equals
/// the input length when the problem is at end of input.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::size_t input_length,
             const std::string& message)
      : Error(ErrorCode::kParse,
              message + " at " + describe(position, input_length)),
        position_(position),
        at_end_(position >= input_length) {}

  std::size_t position() const noexcept { return position_; }
  bool at_end() const noexcept { return at_end_; }

 private:
  static std::string describe(std::size_t position, std::size_t length) {
    if (position >= length) return "end of input";
    return "position " + std::to_string(position);
  }

  std::size_t position_;
  bool at_end_;
};

}  // namespace komohe
