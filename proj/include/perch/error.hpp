#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace perch {

enum class ErrorKind {
  kInvalidArgument,
  kInvalidHorizon,
  kNumericallyUnstable,
  kOutOfDomain,
  kIntegrationDiverged,
  kFreeFallSingularity,
  kInsufficientHistory,
  kDegenerateFit,
  kInitializationFailed,
  kConfig,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInvalidHorizon: return "invalid-horizon";
    case ErrorKind::kNumericallyUnstable: return "numerically-unstable";
    case ErrorKind::kOutOfDomain: return "out-of-domain";
    case ErrorKind::kIntegrationDiverged: return "integration-diverged";
    case ErrorKind::kFreeFallSingularity: return "free-fall-singularity";
    case ErrorKind::kInsufficientHistory: return "insufficient-history";
    case ErrorKind::kDegenerateFit: return "degenerate-fit";
    case ErrorKind::kInitializationFailed: return "initialization-failed";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

/// Every recoverable failure in the library is reported through this type;
/// callers branch on kind() rather than parsing the message.
class PerchError : public std::runtime_error {
 public:
  PerchError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace perch
