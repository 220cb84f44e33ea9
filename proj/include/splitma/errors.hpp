#pragma once

#include <stdexcept>
#include <string>

namespace splitma {

enum class ErrorKind {
  InvalidArgument,
  UnsupportedBackend,
  GridMismatch,
  NonPositive,
  NotPluriclosed,
  NotConverged,
  Incompatible,
  DegenerateBasis,
  NotInCone,
  Ellipticity,
  Config,
};

/// Single exception type for the library; `kind()` says what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::UnsupportedBackend: return "unsupported-backend";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::NonPositive: return "non-positive";
    case ErrorKind::NotPluriclosed: return "not-pluriclosed";
    case ErrorKind::NotConverged: return "not-converged";
    case ErrorKind::Incompatible: return "incompatible-data";
    case ErrorKind::DegenerateBasis: return "degenerate-basis";
    case ErrorKind::NotInCone: return "not-in-cone";
    case ErrorKind::Ellipticity: return "ellipticity";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace splitma
