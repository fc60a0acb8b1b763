#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vlscan {

enum class ErrorCode {
  kParallelLinePlane,
  kLineInPlane,
  kDegeneratePlane,
  kRankDeficient,
  kBehindCamera,
  kNoConvergence,
  kDomainError,
  kOutsideHemisphere,
  kDegenerateConfiguration,
  kDegenerateMotion,
  kInsufficientViews,
  kCheiralityError,
  kMissingLaserPixels,
  kCollinearPoints,
  kNoOverlap,
  kFrameTagMismatch,
  kConfigError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the toolkit; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vlscan
