/// @file error.h
/// @brief Error kinds and the warning sink shared by all pipeline stages.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rearrange {

enum class ErrorKind {
  kMissingFile,
  kMalformedHeader,
  kNonFinite,
  kBeatGridMismatch,
  kInvalidArgument,
  kOutOfRange,
  kNumerical,
  kInfeasible,
  kIo,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind lets
/// callers (the CLI in particular) map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// No beat path satisfies the start/end/duration constraints.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& message)
      : Error(ErrorKind::kInfeasible, message) {}
};

/// Collects non-fatal warnings (degenerate bandwidths, reduced cluster
/// counts, ...). Pass nullptr where a stage accepts one to drop them.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  bool empty() const noexcept { return warnings.empty(); }
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->warn(std::move(message));
}

}  // namespace rearrange
