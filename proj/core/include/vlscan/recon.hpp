#pragma once

#include <span>
#include <vector>

#include "vlscan/camera.hpp"
#include "vlscan/extract.hpp"
#include "vlscan/geom.hpp"

namespace vlscan {

enum class PointStatus { kValid, kInvalidRow, kParallelRay, kBehindCamera };

std::string_view to_string(PointStatus s);

enum class CloudFrame { kCamera, kWorld };

struct CloudPoint {
  Vec3 p = Vec3::Zero();
  int frame = 0;
  int row = 0;
  PointStatus status = PointStatus::kValid;

  bool valid() const { return status == PointStatus::kValid; }
};

struct PointCloud {
  CloudFrame frame = CloudFrame::kCamera;
  std::vector<CloudPoint> points;

  int valid_count() const;
  std::vector<Vec3> valid_points() const;
};

// Intersects the back-projected ray of every valid profile row with the
// laser plane (camera frame). Points with lambda <= 0 or parallel rays are
// kept but flagged.
PointCloud triangulate(const LaserProfile& profile, const Intrinsics& K, const PlaneParams& plane, int frame = 0);
PointCloud triangulate(const LaserProfile& profile, const Intrinsics& K, const Distortion& d,
                       const PlaneParams& plane, int frame = 0);

struct ScanFrame {
  PointCloud cloud;       // camera frame
  Pose camera_to_world;
};

// World-frame concatenation sorted by (frame, row). Throws FrameTagMismatch
// on a world-frame input or on frame ids shared between inputs.
PointCloud assemble_scan(std::span<const ScanFrame> frames);

// Camera-frame points from a ground-truth profile: depth times K^-1 (u, v, 1).
PointCloud points_from_depth(const GroundTruthProfile& gt, const Intrinsics& K, int frame = 0);

struct EvalEntry {
  int frame = 0;
  int row = 0;
  Vec3 estimate;
  Vec3 truth;
  double z_error = 0.0;  // estimate.z - truth.z
};

struct EvalReport {
  std::vector<EvalEntry> entries;
  double rms = 0.0;
  double mean = 0.0;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  Vec3 mean_direction = Vec3::Zero();  // mean of unit difference vectors, normalized

  // Fraction of entries with |z_error| below the bound.
  double fraction_within(double bound) const;
};

// Compares valid points matched by (frame, row). Throws NoOverlap when no pair
// matches or the clouds use different frame tags.
EvalReport evaluate(const PointCloud& cloud, const PointCloud& truth);

// Recomputes the summary statistics from entries.
void summarize(EvalReport& report);

}  // namespace vlscan
