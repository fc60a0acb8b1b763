#include "vlscan/error.hpp"

namespace vlscan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParallelLinePlane: return "ParallelLinePlane";
    case ErrorCode::kLineInPlane: return "LineInPlane";
    case ErrorCode::kDegeneratePlane: return "DegeneratePlane";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kOutsideHemisphere: return "OutsideHemisphere";
    case ErrorCode::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::kDegenerateMotion: return "DegenerateMotion";
    case ErrorCode::kInsufficientViews: return "InsufficientViews";
    case ErrorCode::kCheiralityError: return "CheiralityError";
    case ErrorCode::kMissingLaserPixels: return "MissingLaserPixels";
    case ErrorCode::kCollinearPoints: return "CollinearPoints";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kFrameTagMismatch: return "FrameTagMismatch";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace vlscan
