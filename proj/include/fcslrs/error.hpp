#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fcslrs {

/// Machine-readable failure classes. The numeric values double as CLI exit
/// codes, so they are stable and never reused.
enum class ErrorCode : int {
  invalid_argument = 10,
  parameter_constraint = 11,
  generation_failure = 12,
  no_prime_in_sphere = 13,
  domain = 14,
  duplicate_member = 15,
  not_a_member = 16,
  degenerate_context = 17,
  invalid_witness = 18,
  decode = 19,
  encode = 20,
  io = 21,
  unknown_key = 22,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parameter_constraint: return "parameter_constraint";
    case ErrorCode::generation_failure: return "generation_failure";
    case ErrorCode::no_prime_in_sphere: return "no_prime_in_sphere";
    case ErrorCode::domain: return "domain";
    case ErrorCode::duplicate_member: return "duplicate_member";
    case ErrorCode::not_a_member: return "not_a_member";
    case ErrorCode::degenerate_context: return "degenerate_context";
    case ErrorCode::invalid_witness: return "invalid_witness";
    case ErrorCode::decode: return "decode";
    case ErrorCode::encode: return "encode";
    case ErrorCode::io: return "io";
    case ErrorCode::unknown_key: return "unknown_key";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the wire decoder; carries the byte offset where parsing stopped.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t position, const std::string& what)
      : Error(ErrorCode::decode, what + " at byte " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace fcslrs
