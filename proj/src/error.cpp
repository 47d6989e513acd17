#include "swarmsim/error.hpp"

namespace swarmsim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidGeometry: return "InvalidGeometry";
    case ErrorKind::NegativeSpeed: return "NegativeSpeed";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SingularInertia: return "SingularInertia";
    case ErrorKind::RankDeficientLayout: return "RankDeficientLayout";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::DegenerateAlignment: return "DegenerateAlignment";
    case ErrorKind::PathTooShort: return "PathTooShort";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::BindError: return "BindError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace swarmsim
