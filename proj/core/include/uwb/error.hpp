#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uwb {

enum class ErrorCode {
  InvalidArgument,
  ZeroInterval,
  ScheduleOverlap,
  Degenerate,
  NoConvergence,
  DegenerateDraw,
  NegativeVariance,
  ConfigNotFound,
  ConfigParse,
  Io,
};

/// Stable upper-case identifier used in CLI error lines, e.g. CONFIG_NOT_FOUND.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace uwb
