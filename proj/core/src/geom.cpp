#include "vlscan/geom.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "vlscan/error.hpp"

namespace vlscan {

Mat3 rot_x(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix(); }
Mat3 rot_y(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitY()).toRotationMatrix(); }
Mat3 rot_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

Mat3 rotation_exp(const Vec3& omega) {
  const double theta = omega.norm();
  Mat3 W;
  W << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;
  if (theta < 1e-8) {
    // Second-order series keeps the map smooth for finite differencing.
    return Mat3::Identity() + W + 0.5 * W * W;
  }
  const double s = std::sin(theta) / theta;
  const double c = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + s * W + c * W * W;
}

Vec3 rotation_log(const Mat3& R) {
  Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

double rotation_geodesic(const Mat3& a, const Mat3& b) {
  Mat3 rel = a.transpose() * b;
  double c = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
  // acos loses precision near zero; use the skew part there.
  Vec3 skew(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  return std::atan2(0.5 * skew.norm(), c);
}

double orthonormality_error(const Mat3& R) {
  return (R.transpose() * R - Mat3::Identity()).norm();
}

PlaneParams PlaneParams::normalized() const {
  const double n = normal().norm();
  if (!(n > 0.0)) {
    throw Error(ErrorCode::kDegeneratePlane, "plane normal has zero length");
  }
  return scaled(1.0 / n);
}

PlaneParams PlaneParams::transformed(const Pose& pose) const {
  const Vec3 n = pose.R * normal();
  return {n.x(), n.y(), n.z(), d - n.dot(pose.t)};
}

Vec3 PlaneParams::point_on_plane() const { return plane_point_from_four_vector(*this); }

Vec3 plane_point_from_four_vector(const PlaneParams& plane) {
  const Vec3 n = plane.normal();
  const double n2 = n.squaredNorm();
  if (!(n2 > 0.0)) {
    throw Error(ErrorCode::kDegeneratePlane, "plane normal has zero length");
  }
  return -plane.d * n / n2;
}

LinePlaneHit intersect_line_plane(const Line3& line, const PlaneParams& plane) {
  const Vec3 n = plane.normal();
  const double vn = line.v.dot(n);
  if (std::abs(vn) <= kParallelTolerance * line.v.norm() * n.norm()) {
    if (std::abs(plane.signed_distance(line.l0)) <= 1e-12) {
      throw Error(ErrorCode::kLineInPlane, "line lies in the plane");
    }
    throw Error(ErrorCode::kParallelLinePlane, "line is parallel to the plane");
  }
  // n . (l0 + lambda v - p0) = 0 with n . p0 = -d.
  const double lambda = -plane.evaluate(line.l0) / vn;
  return {line.at(lambda), lambda};
}

Mat3 nearest_rotation(const Mat3& M) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (!(svd.singularValues()(2) > 1e-12)) {
    throw Error(ErrorCode::kRankDeficient, "matrix is rank deficient");
  }
  const Mat3& U = svd.matrixU();
  const Mat3& V = svd.matrixV();
  Mat3 D = Mat3::Identity();
  // Flip the least significant direction when U V^T is a reflection.
  D(2, 2) = (U * V.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return U * D * V.transpose();
}

}  // namespace vlscan
