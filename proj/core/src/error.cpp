#include "uwb/error.hpp"

namespace uwb {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ZeroInterval: return "ZERO_INTERVAL";
    case ErrorCode::ScheduleOverlap: return "SCHEDULE_OVERLAP";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::DegenerateDraw: return "DEGENERATE_DRAW";
    case ErrorCode::NegativeVariance: return "NEGATIVE_VARIANCE";
    case ErrorCode::ConfigNotFound: return "CONFIG_NOT_FOUND";
    case ErrorCode::ConfigParse: return "CONFIG_PARSE";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace uwb
