#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swarmsim {

enum class ErrorKind {
  InvalidGeometry,
  NegativeSpeed,
  LengthMismatch,
  SingularInertia,
  RankDeficientLayout,
  ShapeMismatch,
  NoOverlap,
  DegenerateAlignment,
  PathTooShort,
  ParseError,
  NonMonotonicTime,
  ConfigError,
  IoError,
  BindError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace swarmsim
