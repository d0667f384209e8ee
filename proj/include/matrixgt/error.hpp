#pragma once

#include <stdexcept>
#include <string>

namespace matrixgt {

/// Base of every error raised by the library. `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind { Config, Domain, Format, Truncation, Io, Validation, BehindCamera };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(Kind::Config, what) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(Kind::Domain, what) {}
};

struct FormatError : Error {
  explicit FormatError(const std::string& what) : Error(Kind::Format, what) {}
};

struct TruncationError : Error {
  explicit TruncationError(const std::string& what) : Error(Kind::Truncation, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(Kind::Io, what) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(Kind::Validation, what) {}
};

struct BehindCameraError : Error {
  explicit BehindCameraError(const std::string& what) : Error(Kind::BehindCamera, what) {}
};

}  // namespace matrixgt
