#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fkp {

enum class ErrorCode {
  invalid_argument,
  parse_error,
  not_found,
  validation_failed,
  integrity,
  version_conflict,
  unauthorized,
  forbidden,
  state,
  transport,  // retryable
  permanent,
  io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure the portal reports to callers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  bool retryable() const noexcept { return code_ == ErrorCode::transport; }

 private:
  ErrorCode code_;
};

}  // namespace fkp
