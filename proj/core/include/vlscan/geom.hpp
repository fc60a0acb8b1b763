#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace vlscan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using HomPoint = Eigen::Vector4d;

inline HomPoint homogenize(const Vec3& p) { return {p.x(), p.y(), p.z(), 1.0}; }

// Requires w != 0.
inline Vec3 dehomogenize(const HomPoint& h) { return h.head<3>() / h.w(); }

// Rigid transform x -> R x + t. Used for T_cw (world to camera) and for
// object, board and laser placement.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose translation(const Vec3& t) { return {Mat3::Identity(), t}; }

  Vec3 apply(const Vec3& p) const { return R * p + t; }
  Vec3 rotate(const Vec3& v) const { return R * v; }

  // (this * other)(x) == this(other(x))
  Pose operator*(const Pose& other) const { return {R * other.R, R * other.t + t}; }

  Pose inverse() const {
    Mat3 rt = R.transpose();
    return {rt, -(rt * t)};
  }

  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = R;
    m.topRightCorner<3, 1>() = t;
    return m;
  }
};

inline Pose compose(const Pose& a, const Pose& b) { return a * b; }
inline Pose inverse(const Pose& p) { return p.inverse(); }

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

// Rodrigues map from an axis-angle vector; the inverse is rotation_log.
Mat3 rotation_exp(const Vec3& omega);
Vec3 rotation_log(const Mat3& R);

// Angle of R_a^T R_b in radians.
double rotation_geodesic(const Mat3& a, const Mat3& b);

// Frobenius distances to orthonormality and to det = +1, for invariant checks.
double orthonormality_error(const Mat3& R);

// L = { l0 + lambda v }.
struct Line3 {
  Vec3 l0 = Vec3::Zero();
  Vec3 v = Vec3::UnitZ();

  Vec3 at(double lambda) const { return l0 + lambda * v; }
};

// Plane a x + b y + c z + d = 0, stored as the four-vector phi.
struct PlaneParams {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double d = 0.0;

  static PlaneParams from_vector(const Vec4& phi) { return {phi[0], phi[1], phi[2], phi[3]}; }
  static PlaneParams from_point_normal(const Vec3& point, const Vec3& normal) {
    return {normal.x(), normal.y(), normal.z(), -normal.dot(point)};
  }

  Vec4 vector() const { return {a, b, c, d}; }
  Vec3 normal() const { return {a, b, c}; }

  // a x + b y + c z + d, unnormalized.
  double evaluate(const Vec3& p) const { return a * p.x() + b * p.y() + c * p.z() + d; }
  double signed_distance(const Vec3& p) const { return evaluate(p) / normal().norm(); }

  // Same point set, unit normal. Throws DegeneratePlane on a zero normal.
  PlaneParams normalized() const;
  PlaneParams scaled(double s) const { return {a * s, b * s, c * s, d * s}; }

  // Covariant transform of the plane under a rigid motion of space.
  PlaneParams transformed(const Pose& pose) const;

  // The point of the plane closest to the origin, -d n / |n|^2.
  Vec3 point_on_plane() const;
};

struct LinePlaneHit {
  Vec3 point;
  double lambda;
};

// Intersection of a line with a plane. Throws ParallelLinePlane when
// |v.n| <= 1e-9 |v||n|, or LineInPlane when the line additionally lies in the
// plane.
LinePlaneHit intersect_line_plane(const Line3& line, const PlaneParams& plane);

inline Vec3 line_plane_intersect(const Line3& line, const PlaneParams& plane) {
  return intersect_line_plane(line, plane).point;
}

Vec3 plane_point_from_four_vector(const PlaneParams& plane);

// Orthogonal Procrustes: the proper rotation nearest to M in Frobenius norm.
// Throws RankDeficient when the smallest singular value is <= 1e-12.
Mat3 nearest_rotation(const Mat3& M);

inline constexpr double kParallelTolerance = 1e-9;

}  // namespace vlscan
