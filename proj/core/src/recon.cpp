#include "vlscan/recon.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "vlscan/error.hpp"

namespace vlscan {

std::string_view to_string(PointStatus s) {
  switch (s) {
    case PointStatus::kValid: return "valid";
    case PointStatus::kInvalidRow: return "invalid_row";
    case PointStatus::kParallelRay: return "parallel_ray";
    case PointStatus::kBehindCamera: return "behind_camera";
  }
  return "unknown";
}

int PointCloud::valid_count() const {
  return static_cast<int>(std::count_if(points.begin(), points.end(), [](const CloudPoint& p) { return p.valid(); }));
}

std::vector<Vec3> PointCloud::valid_points() const {
  std::vector<Vec3> out;
  for (const auto& p : points) {
    if (p.valid()) out.push_back(p.p);
  }
  return out;
}

namespace {

PointCloud triangulate_rays(const LaserProfile& profile, const PlaneParams& plane, int frame,
                            const auto& ray_of) {
  PointCloud cloud;
  cloud.frame = CloudFrame::kCamera;
  for (const ProfileRow& r : profile.rows) {
    CloudPoint cp;
    cp.frame = frame;
    cp.row = r.row;
    if (!r.valid()) {
      cp.status = PointStatus::kInvalidRow;
      cloud.points.push_back(cp);
      continue;
    }
    try {
      const Line3 ray = ray_of(profile.pixel(r));
      const LinePlaneHit hit = intersect_line_plane(ray, plane);
      cp.p = hit.point;
      if (!(hit.lambda > 0.0)) cp.status = PointStatus::kBehindCamera;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kParallelLinePlane && e.code() != ErrorCode::kLineInPlane &&
          e.code() != ErrorCode::kNoConvergence) {
        throw;
      }
      cp.status = PointStatus::kParallelRay;
    }
    cloud.points.push_back(cp);
  }
  return cloud;
}

}  // namespace

PointCloud triangulate(const LaserProfile& profile, const Intrinsics& K, const PlaneParams& plane, int frame) {
  return triangulate_rays(profile, plane, frame, [&](const Pixel& px) { return unproject_to_ray(K, px); });
}

PointCloud triangulate(const LaserProfile& profile, const Intrinsics& K, const Distortion& d,
                       const PlaneParams& plane, int frame) {
  return triangulate_rays(profile, plane, frame, [&](const Pixel& px) { return unproject_to_ray(K, d, px); });
}

PointCloud assemble_scan(std::span<const ScanFrame> frames) {
  PointCloud out;
  out.frame = CloudFrame::kWorld;
  std::set<int> seen;
  for (const ScanFrame& f : frames) {
    if (f.cloud.frame != CloudFrame::kCamera) {
      throw Error(ErrorCode::kFrameTagMismatch, "scan frames must be camera-frame clouds");
    }
    std::set<int> ids;
    for (const CloudPoint& p : f.cloud.points) ids.insert(p.frame);
    for (int id : ids) {
      if (!seen.insert(id).second) {
        throw Error(ErrorCode::kFrameTagMismatch, "frame id " + std::to_string(id) + " appears in two inputs");
      }
    }
    for (CloudPoint p : f.cloud.points) {
      p.p = f.camera_to_world.apply(p.p);
      out.points.push_back(p);
    }
  }
  std::stable_sort(out.points.begin(), out.points.end(), [](const CloudPoint& a, const CloudPoint& b) {
    return std::pair(a.frame, a.row) < std::pair(b.frame, b.row);
  });
  return out;
}

PointCloud points_from_depth(const GroundTruthProfile& gt, const Intrinsics& K, int frame) {
  PointCloud cloud;
  const Mat3 Ki = K.inverse();
  for (std::size_t i = 0; i < gt.profile.rows.size(); ++i) {
    const ProfileRow& r = gt.profile.rows[i];
    CloudPoint cp;
    cp.frame = frame;
    cp.row = r.row;
    if (!r.valid() || !std::isfinite(gt.depth[i])) {
      cp.status = PointStatus::kInvalidRow;
    } else {
      const Pixel px = gt.profile.pixel(r);
      cp.p = gt.depth[i] * (Ki * Vec3(px.x(), px.y(), 1.0));
    }
    cloud.points.push_back(cp);
  }
  return cloud;
}

double EvalReport::fraction_within(double bound) const {
  if (entries.empty()) return 0.0;
  const auto n = std::count_if(entries.begin(), entries.end(),
                               [&](const EvalEntry& e) { return std::abs(e.z_error) < bound; });
  return static_cast<double>(n) / static_cast<double>(entries.size());
}

void summarize(EvalReport& report) {
  report.rms = report.mean = report.max_abs = report.mean_abs = 0.0;
  report.mean_direction.setZero();
  if (report.entries.empty()) return;
  Vec3 dir = Vec3::Zero();
  for (const EvalEntry& e : report.entries) {
    report.mean += e.z_error;
    report.mean_abs += std::abs(e.z_error);
    report.rms += e.z_error * e.z_error;
    report.max_abs = std::max(report.max_abs, std::abs(e.z_error));
    const Vec3 diff = e.estimate - e.truth;
    if (diff.norm() > 0.0) dir += diff.normalized();
  }
  const double n = static_cast<double>(report.entries.size());
  report.mean /= n;
  report.mean_abs /= n;
  report.rms = std::sqrt(report.rms / n);
  if (dir.norm() > 0.0) report.mean_direction = dir.normalized();
}

EvalReport evaluate(const PointCloud& cloud, const PointCloud& truth) {
  if (cloud.frame != truth.frame) throw Error(ErrorCode::kNoOverlap, "clouds use different frame tags");
  std::map<std::pair<int, int>, Vec3> lookup;
  for (const CloudPoint& p : truth.points) {
    if (p.valid()) lookup[{p.frame, p.row}] = p.p;
  }
  EvalReport report;
  for (const CloudPoint& p : cloud.points) {
    if (!p.valid()) continue;
    const auto it = lookup.find({p.frame, p.row});
    if (it == lookup.end()) continue;
    report.entries.push_back({p.frame, p.row, p.p, it->second, p.p.z() - it->second.z()});
  }
  if (report.entries.empty()) throw Error(ErrorCode::kNoOverlap, "no (frame, row) pairs in common");
  std::sort(report.entries.begin(), report.entries.end(), [](const EvalEntry& a, const EvalEntry& b) {
    return std::pair(a.frame, a.row) < std::pair(b.frame, b.row);
  });
  summarize(report);
  return report;
}

}  // namespace vlscan
