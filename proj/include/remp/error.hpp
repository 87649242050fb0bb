#pragma once

#include <stdexcept>
#include <string>

namespace remp {

enum class ErrorCode {
  InvalidArgument = 1,
  Io = 2,
  Config = 3,
  State = 4,
  Internal = 5,
};

/// Base exception for the engine. The C API maps `code()` onto `remp_status`.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCode::Config, what) {}
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::InvalidArgument, what) {}
};

} // namespace remp
