#include "vlscan/calib.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vlscan/error.hpp"

namespace vlscan {

Homography Homography::normalized(const Mat3& M) {
  Mat3 H = M / M.norm();
  double sign = H(2, 2);
  if (sign == 0.0) {
    for (int c = 0; c < 3 && sign == 0.0; ++c) sign = H(2, c);
  }
  if (sign < 0.0) H = -H;
  return {H};
}

Pixel Homography::map(const Vec2& world) const {
  const Vec3 p = H * Vec3(world.x(), world.y(), 1.0);
  return p.head<2>() / p.z();
}

Vec2 Homography::inverse_map(const Pixel& image) const {
  const Vec3 p = H.inverse() * Vec3(image.x(), image.y(), 1.0);
  return p.head<2>() / p.z();
}

std::vector<double> transfer_errors(const Homography& H, std::span<const Correspondence2D3D> corrs) {
  std::vector<double> out;
  out.reserve(corrs.size());
  for (const auto& c : corrs) out.push_back((H.map(c.world) - c.image).norm());
  return out;
}

double max_transfer_error(const Homography& H, std::span<const Correspondence2D3D> corrs) {
  const auto e = transfer_errors(H, corrs);
  return e.empty() ? 0.0 : *std::max_element(e.begin(), e.end());
}

namespace {

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Mat3 hartley_normalization(const std::vector<Vec2>& pts) {
  Vec2 c = Vec2::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean = 0.0;
  for (const auto& p : pts) mean += (p - c).norm();
  mean /= static_cast<double>(pts.size());
  const double s = mean > 0.0 ? std::sqrt(2.0) / mean : 1.0;
  Mat3 T;
  T << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return T;
}

Vec2 apply_h(const Mat3& T, const Vec2& p) {
  const Vec3 q = T * Vec3(p.x(), p.y(), 1.0);
  return q.head<2>() / q.z();
}

}  // namespace

Homography estimate_homography_dlt(std::span<const Correspondence2D3D> corrs) {
  const int n = static_cast<int>(corrs.size());
  if (n < 4) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "homography needs at least 4 correspondences, got " + std::to_string(n));
  }
  std::vector<Vec2> world, image;
  for (const auto& c : corrs) {
    world.push_back(c.world);
    image.push_back(c.image);
  }
  const Mat3 Tw = hartley_normalization(world);
  const Mat3 Ti = hartley_normalization(image);

  Eigen::MatrixXd A(2 * n, 9);
  for (int i = 0; i < n; ++i) {
    const Vec2 w = apply_h(Tw, world[i]);
    const Vec2 p = apply_h(Ti, image[i]);
    const double X = w.x(), Y = w.y(), u = p.x(), v = p.y();
    A.row(2 * i) << -X, -Y, -1, 0, 0, 0, u * X, u * Y, u;
    A.row(2 * i + 1) << 0, 0, 0, -X, -Y, -1, v * X, v * Y, v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A one-dimensional null space requires eight independent constraints.
  if (sv.size() < 8 || !(sv(7) > 1e-10 * sv(0))) {
    throw Error(ErrorCode::kDegenerateConfiguration, "correspondences are degenerate (collinear points)");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Mat3 Hn;
  Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Mat3 H = Ti.inverse() * Hn * Tw;
  if (!(std::abs(H.determinant()) > 1e-12 * std::pow(H.norm(), 3))) {
    throw Error(ErrorCode::kDegenerateConfiguration, "estimated homography is singular");
  }
  return Homography::normalized(H);
}

namespace {

Mat3 unpack_homography(const Eigen::VectorXd& x) {
  Mat3 H;
  H << x(0), x(1), x(2), x(3), x(4), x(5), x(6), x(7), x(8);
  return H;
}

}  // namespace

LeastSquaresProblem homography_problem(std::span<const Correspondence2D3D> corrs) {
  LeastSquaresProblem prob;
  prob.residual = [corrs](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const int n = static_cast<int>(corrs.size());
    const Mat3 H = unpack_homography(x);
    r.resize(2 * n);
    for (int i = 0; i < n; ++i) {
      const Vec3 q = H * Vec3(corrs[i].world.x(), corrs[i].world.y(), 1.0);
      r(2 * i) = q.x() / q.z() - corrs[i].image.x();
      r(2 * i + 1) = q.y() / q.z() - corrs[i].image.y();
    }
  };
  prob.jacobian = [corrs](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
    const int n = static_cast<int>(corrs.size());
    const Mat3 H = unpack_homography(x);
    J.setZero(2 * n, 9);
    for (int i = 0; i < n; ++i) {
      const Vec3 p(corrs[i].world.x(), corrs[i].world.y(), 1.0);
      const Vec3 q = H * p;
      const double w = q.z();
      const double u = q.x() / w;
      const double v = q.y() / w;
      J.block<1, 3>(2 * i, 0) = p.transpose() / w;
      J.block<1, 3>(2 * i, 6) = -u * p.transpose() / w;
      J.block<1, 3>(2 * i + 1, 3) = p.transpose() / w;
      J.block<1, 3>(2 * i + 1, 6) = -v * p.transpose() / w;
    }
  };
  return prob;
}

HomographyRefinement refine_homography(const Homography& H0, std::span<const Correspondence2D3D> corrs,
                                       const LMOptions& options) {
  const LeastSquaresProblem prob = homography_problem(corrs);
  Eigen::VectorXd x0(9);
  for (int k = 0; k < 9; ++k) x0(k) = H0.H(k / 3, k % 3);
  LMResult res = lm_solve(prob.residual, prob.jacobian, x0, options);
  HomographyRefinement out;
  out.homography = Homography::normalized(unpack_homography(res.x));
  out.report = res.report;
  out.converged = res.report.converged();
  return out;
}

Homography homography_from_pose(const Pose& pose, const Intrinsics& K) {
  Mat3 M;
  M.col(0) = pose.R.col(0);
  M.col(1) = pose.R.col(1);
  M.col(2) = pose.t;
  return Homography::normalized(K.matrix() * M);
}

Pose pose_from_homography(const Homography& hom, const Intrinsics& K) {
  const Mat3 Ki = K.inverse();
  const Vec3 a1 = Ki * hom.H.col(0);
  const Vec3 a2 = Ki * hom.H.col(1);
  const Vec3 a3 = Ki * hom.H.col(2);
  double lambda = 1.0 / a1.norm();
  if (!std::isfinite(lambda)) {
    throw Error(ErrorCode::kCheiralityError, "homography has a zero first column");
  }
  if (a3.z() * lambda < 0.0) lambda = -lambda;
  const Vec3 t = lambda * a3;
  if (!(t.z() > 0.0)) {
    throw Error(ErrorCode::kCheiralityError, "no sign of the homography puts the board in front of the camera");
  }
  const Vec3 r1 = lambda * a1;
  const Vec3 r2 = lambda * a2;
  Mat3 R_hat;
  R_hat.col(0) = r1;
  R_hat.col(1) = r2;
  R_hat.col(2) = r1.cross(r2);
  return {nearest_rotation(R_hat), t};
}

namespace {

// Constraint row v_ij of the image of the absolute conic,
// b = (B11, B12, B22, B13, B23, B33).
Eigen::Matrix<double, 1, 6> conic_row(const Mat3& H, int i, int j) {
  const Vec3 hi = H.col(i);
  const Vec3 hj = H.col(j);
  Eigen::Matrix<double, 1, 6> v;
  v << hi(0) * hj(0), hi(0) * hj(1) + hi(1) * hj(0), hi(1) * hj(1), hi(2) * hj(0) + hi(0) * hj(2),
      hi(2) * hj(1) + hi(1) * hj(2), hi(2) * hj(2);
  return v;
}

}  // namespace

Intrinsics zhang_closed_form(std::span<const Homography> homographies, int width, int height,
                             bool zero_skew) {
  const int n = static_cast<int>(homographies.size());
  if (n < 3) {
    throw Error(ErrorCode::kInsufficientViews, "need at least 3 views, got " + std::to_string(n));
  }
  // Condition pixel coordinates to roughly unit range; undone on K below.
  const double scale = 0.5 * (width + height);
  Mat3 N;
  N << 1.0 / scale, 0, -0.5 * width / scale, 0, 1.0 / scale, -0.5 * height / scale, 0, 0, 1;

  Eigen::MatrixXd V(2 * n, 6);
  for (int k = 0; k < n; ++k) {
    const Mat3 H = N * homographies[k].H;
    V.row(2 * k) = conic_row(H, 0, 1);
    V.row(2 * k + 1) = conic_row(H, 0, 0) - conic_row(H, 1, 1);
  }
  Eigen::VectorXd b(6);
  if (zero_skew) {
    Eigen::MatrixXd Vr(2 * n, 5);
    Vr << V.col(0), V.col(2), V.col(3), V.col(4), V.col(5);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Vr, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(3) > 1e-9 * sv(0))) {
      throw Error(ErrorCode::kDegenerateMotion, "board poses do not constrain the intrinsics");
    }
    const Eigen::VectorXd br = svd.matrixV().col(4);
    b << br(0), 0.0, br(1), br(2), br(3), br(4);
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(4) > 1e-9 * sv(0))) {
      throw Error(ErrorCode::kDegenerateMotion, "board poses do not constrain the intrinsics");
    }
    b = svd.matrixV().col(5);
  }
  if (b(0) < 0.0) b = -b;
  const double B11 = b(0), B12 = b(1), B22 = b(2), B13 = b(3), B23 = b(4), B33 = b(5);
  const double den = B11 * B22 - B12 * B12;
  if (!(B11 > 0.0) || !(den > 0.0)) {
    throw Error(ErrorCode::kDegenerateMotion, "absolute conic estimate is not positive definite");
  }
  const double v0 = (B12 * B13 - B11 * B23) / den;
  const double lambda = B33 - (B13 * B13 + v0 * (B12 * B13 - B11 * B23)) / B11;
  if (!(lambda / B11 > 0.0)) {
    throw Error(ErrorCode::kDegenerateMotion, "absolute conic estimate is not positive definite");
  }
  const double alpha = std::sqrt(lambda / B11);
  const double beta = std::sqrt(lambda * B11 / den);
  const double gamma = -B12 * alpha * alpha * beta / lambda;
  const double u0 = gamma * v0 / beta - B13 * alpha * alpha / lambda;

  Mat3 Kn;
  Kn << alpha, gamma, u0, 0, beta, v0, 0, 0, 1;
  const Mat3 K = N.inverse() * Kn;
  Intrinsics out;
  out.fx = K(0, 0);
  out.s = K(0, 1);
  out.cx = K(0, 2);
  out.fy = K(1, 1);
  out.cy = K(1, 2);
  out.width = width;
  out.height = height;
  return out;
}

namespace {

Pixel project_board_point(const Intrinsics& K, const Distortion& d, const Pose& pose, const Vec2& w) {
  const Vec3 pc = pose.R.col(0) * w.x() + pose.R.col(1) * w.y() + pose.t;
  const double z = std::max(pc.z(), 1e-9);
  const Vec2 n = apply_distortion(d, Vec2(pc.x() / z, pc.y() / z));
  return {K.fx * n.x() + K.s * n.y() + K.cx, K.fy * n.y() + K.cy};
}

// Parameter layout: fx fy cx cy [s] [k1 k2 p1 p2 k3] then (omega, t) per view.
struct BundleLayout {
  bool skew;
  bool distortion;
  int n_views;

  int intrinsic_count() const { return 4 + (skew ? 1 : 0) + (distortion ? 5 : 0); }
  int view_offset(int v) const { return intrinsic_count() + 6 * v; }
  int size() const { return intrinsic_count() + 6 * n_views; }

  void unpack(const Eigen::VectorXd& x, Intrinsics& K, Distortion& d) const {
    K.fx = x(0);
    K.fy = x(1);
    K.cx = x(2);
    K.cy = x(3);
    int k = 4;
    K.s = skew ? x(k++) : 0.0;
    if (distortion) {
      d.k1 = x(k);
      d.k2 = x(k + 1);
      d.p1 = x(k + 2);
      d.p2 = x(k + 3);
      d.k3 = x(k + 4);
    }
  }
  Pose view_pose(const Eigen::VectorXd& x, int v) const {
    const int o = view_offset(v);
    return {rotation_exp(x.segment<3>(o)), x.segment<3>(o + 3)};
  }
};

}  // namespace

double reprojection_rms(const Intrinsics& K, const Distortion& d, const Pose& pose,
                        std::span<const Correspondence2D3D> corrs) {
  double sum = 0.0;
  for (const auto& c : corrs) sum += (project_board_point(K, d, pose, c.world) - c.image).squaredNorm();
  return corrs.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(corrs.size()));
}

CameraCalibration zhang_intrinsics(std::span<const CalibView> views, int width, int height,
                                   const ZhangOptions& options) {
  const int n_views = static_cast<int>(views.size());
  if (n_views < 3) {
    throw Error(ErrorCode::kInsufficientViews, "need at least 3 views, got " + std::to_string(n_views));
  }
  std::vector<Homography> homographies;
  for (const CalibView& view : views) {
    const Homography h0 = estimate_homography_dlt(view.correspondences);
    homographies.push_back(refine_homography(h0, view.correspondences).homography);
  }

  CameraCalibration out;
  out.closed_form = zhang_closed_form(homographies, width, height, options.zero_skew);
  for (const Homography& h : homographies) out.poses.push_back(pose_from_homography(h, out.closed_form));
  out.intrinsics = out.closed_form;

  const BundleLayout layout{!options.zero_skew, options.estimate_distortion, n_views};
  std::vector<int> row_offset(n_views + 1, 0);
  for (int v = 0; v < n_views; ++v) {
    row_offset[v + 1] = row_offset[v] + 2 * static_cast<int>(views[v].correspondences.size());
  }
  const int m = row_offset[n_views];

  auto view_residuals = [&](const Eigen::VectorXd& x, int v, const Intrinsics& K, const Distortion& d,
                            Eigen::Ref<Eigen::VectorXd> r) {
    const Pose pose = layout.view_pose(x, v);
    const auto& corrs = views[v].correspondences;
    for (std::size_t i = 0; i < corrs.size(); ++i) {
      const Pixel p = project_board_point(K, d, pose, corrs[i].world);
      r(2 * i) = p.x() - corrs[i].image.x();
      r(2 * i + 1) = p.y() - corrs[i].image.y();
    }
  };
  ResidualFn residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    Intrinsics K;
    Distortion d;
    layout.unpack(x, K, d);
    r.resize(m);
    for (int v = 0; v < n_views; ++v) {
      view_residuals(x, v, K, d, r.segment(row_offset[v], row_offset[v + 1] - row_offset[v]));
    }
  };
  // Central differences exploiting the block structure: pose parameters only
  // touch their own view's rows.
  JacobianFn jacobian = [&](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
    J.setZero(m, layout.size());
    Eigen::VectorXd xp = x;
    Eigen::VectorXd rp, rm;
    for (int j = 0; j < layout.intrinsic_count(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
      xp(j) = x(j) + h;
      residual(xp, rp);
      xp(j) = x(j) - h;
      residual(xp, rm);
      xp(j) = x(j);
      J.col(j) = (rp - rm) / (2.0 * h);
    }
    Intrinsics K;
    Distortion d;
    layout.unpack(x, K, d);
    for (int v = 0; v < n_views; ++v) {
      const int rows = row_offset[v + 1] - row_offset[v];
      Eigen::VectorXd bp(rows), bm(rows);
      for (int k = 0; k < 6; ++k) {
        const int j = layout.view_offset(v) + k;
        const double h = 1e-7 * std::max(1.0, std::abs(x(j)));
        xp(j) = x(j) + h;
        view_residuals(xp, v, K, d, bp);
        xp(j) = x(j) - h;
        view_residuals(xp, v, K, d, bm);
        xp(j) = x(j);
        J.block(row_offset[v], j, rows, 1) = (bp - bm) / (2.0 * h);
      }
    }
  };

  Eigen::VectorXd x(layout.size());
  x.setZero();
  x(0) = out.closed_form.fx;
  x(1) = out.closed_form.fy;
  x(2) = out.closed_form.cx;
  x(3) = out.closed_form.cy;
  if (layout.skew) x(4) = out.closed_form.s;
  for (int v = 0; v < n_views; ++v) {
    x.segment<3>(layout.view_offset(v)) = rotation_log(out.poses[v].R);
    x.segment<3>(layout.view_offset(v) + 3) = out.poses[v].t;
  }
  if (options.refine) {
    LMResult res = lm_solve(residual, jacobian, x, options.lm);
    x = res.x;
    out.report = res.report;
  }
  layout.unpack(x, out.intrinsics, out.distortion);
  out.intrinsics.width = width;
  out.intrinsics.height = height;
  double total = 0.0;
  std::size_t count = 0;
  for (int v = 0; v < n_views; ++v) {
    out.poses[v] = layout.view_pose(x, v);
    const double rms = reprojection_rms(out.intrinsics, out.distortion, out.poses[v], views[v].correspondences);
    out.view_rms_px.push_back(rms);
    total += rms * rms * static_cast<double>(views[v].correspondences.size());
    count += views[v].correspondences.size();
  }
  out.rms_px = count ? std::sqrt(total / static_cast<double>(count)) : 0.0;
  return out;
}

std::vector<BackprojectedPoint> backproject_laser_pixels(const CalibView& view, const Intrinsics& K) {
  if (view.laser_pixels.empty()) {
    throw Error(ErrorCode::kMissingLaserPixels, "view " + std::to_string(view.id) + " has no laser pixels");
  }
  if (!view.homography || !view.pose) {
    throw Error(ErrorCode::kMissingLaserPixels,
                "view " + std::to_string(view.id) + " has no recovered homography and pose");
  }
  (void)K;
  std::vector<BackprojectedPoint> out;
  out.reserve(view.laser_pixels.size());
  for (const Pixel& px : view.laser_pixels) {
    const Vec2 w = view.homography->inverse_map(px);
    BackprojectedPoint bp;
    bp.point = view.pose->R.col(0) * w.x() + view.pose->R.col(1) * w.y() + view.pose->t;
    bp.on_board = !view.board_half_extent || (std::abs(w.x()) <= view.board_half_extent->x() &&
                                              std::abs(w.y()) <= view.board_half_extent->y());
    out.push_back(bp);
  }
  return out;
}

double laser_plane_cost(const PlaneParams& plane, std::span<const Vec3> points, double w) {
  const Vec3 n = plane.normal();
  const double m = n.norm();
  const double pen = w * (m - 1.0) * (m - 1.0);
  double cost = 0.0;
  for (const Vec3& p : points) {
    const double e = std::abs(p.dot(n) + plane.d) / m + pen;
    cost += e * e;
  }
  return cost;
}

namespace {

PlaneParams canonical_plane(const PlaneParams& p) {
  PlaneParams q = p.normalized();
  if (q.d > 0.0) q = q.scaled(-1.0);
  return q;
}

}  // namespace

LeastSquaresProblem laser_plane_problem(std::span<const Vec3> points, double w) {
  LeastSquaresProblem prob;
  prob.residual = [points, w](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const int n = static_cast<int>(points.size());
    const Vec3 nv = x.head<3>();
    const double m = nv.norm();
    const double pen = w * (m - 1.0) * (m - 1.0);
    r.resize(n);
    for (int i = 0; i < n; ++i) r(i) = std::abs(points[i].dot(nv) + x(3)) / m + pen;
  };
  prob.jacobian = [points, w](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
    const int n = static_cast<int>(points.size());
    const Vec3 nv = x.head<3>();
    const double m = nv.norm();
    J.resize(n, 4);
    const Vec3 dpen = 2.0 * w * (m - 1.0) * nv / m;
    for (int i = 0; i < n; ++i) {
      const double s = points[i].dot(nv) + x(3);
      const double sg = s >= 0.0 ? 1.0 : -1.0;
      const Vec3 dn = sg * points[i] / m - std::abs(s) * nv / (m * m * m) + dpen;
      J.row(i) << dn.x(), dn.y(), dn.z(), sg / m;
    }
  };
  return prob;
}

PlaneFit fit_laser_plane(std::span<const Vec3> points, const PlaneFitOptions& options) {
  const int n = static_cast<int>(points.size());
  if (n < 3) {
    throw Error(ErrorCode::kCollinearPoints, "plane fit needs at least 3 points, got " + std::to_string(n));
  }
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= n;
  Mat3 scatter = Mat3::Zero();
  for (const Vec3& p : points) scatter += (p - centroid) * (p - centroid).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  // Eigenvalues ascending; rank >= 2 needs the middle one to be significant.
  if (!(eig.eigenvalues()(1) > 1e-18 * std::max(eig.eigenvalues()(2), 1e-300)) ||
      !(eig.eigenvalues()(2) > 0.0)) {
    throw Error(ErrorCode::kCollinearPoints, "points are collinear");
  }

  Eigen::MatrixXd A(n, 4);
  for (int i = 0; i < n; ++i) A.row(i) << points[i].x(), points[i].y(), points[i].z(), 1.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::Vector4d phi0 = svd.matrixV().col(3);

  PlaneFit out;
  out.point_count = points.size();
  out.initial = canonical_plane(PlaneParams::from_vector(phi0));
  out.initial_cost = laser_plane_cost(out.initial, points, options.penalty_weight);
  PlaneParams refined = out.initial;

  if (options.refine) {
    const LeastSquaresProblem prob = laser_plane_problem(points, options.penalty_weight);
    LMResult res = lm_solve(prob.residual, prob.jacobian, out.initial.vector(), options.lm);
    out.report = res.report;
    refined = PlaneParams::from_vector(res.x.head<4>());
    out.final_cost = laser_plane_cost(refined, points, options.penalty_weight);
  } else {
    out.final_cost = out.initial_cost;
  }
  out.plane = canonical_plane(refined);

  double sum_abs = 0.0, sum_sq = 0.0, max_abs = 0.0;
  for (const Vec3& p : points) {
    const double dist = std::abs(out.plane.signed_distance(p));
    sum_abs += dist;
    sum_sq += dist * dist;
    max_abs = std::max(max_abs, dist);
  }
  out.mean_abs_distance = sum_abs / n;
  out.rms_distance = std::sqrt(sum_sq / n);
  out.max_abs_distance = max_abs;
  return out;
}

double normal_angle(const PlaneParams& a, const PlaneParams& b) {
  const Vec3 na = a.normal().normalized();
  const Vec3 nb = b.normal().normalized();
  const double c = std::abs(na.dot(nb));
  return std::atan2(na.cross(nb).norm(), c);
}

}  // namespace vlscan
