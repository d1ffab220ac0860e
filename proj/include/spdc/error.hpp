#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spdc {

enum class ErrorCode {
  InvalidArgument,
  OutOfRange,
  SingularMatrix,
  NotFound,
  PeakNotFound,
  WindowMiss,
  NoNonlinearLayer,
  Config,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Config errors carry the offending key so the CLI can report it.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(ErrorCode::Config, what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace spdc
