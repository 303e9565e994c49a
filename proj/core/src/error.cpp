#include "rearrange/error.h"

namespace rearrange {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kMissingFile: return "missing file";
    case ErrorKind::kMalformedHeader: return "malformed header";
    case ErrorKind::kNonFinite: return "non-finite value";
    case ErrorKind::kBeatGridMismatch: return "beat grid mismatch";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kOutOfRange: return "out of range";
    case ErrorKind::kNumerical: return "numerical failure";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kIo: return "i/o error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace rearrange
