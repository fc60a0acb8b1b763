#include "vlscan/corners.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>

#include "vlscan/imgproc.hpp"

namespace vlscan {

namespace {

struct Candidate {
  Pixel p;
  double response;
  Vec2 e1;  // edge directions through the junction
  Vec2 e2;
};

constexpr int kRingSamples = 32;

// X-junction test on a circle around p: four sign changes about the ring
// mean and near point symmetry. On success fills the two edge directions.
bool ring_test(const Image& s, const Pixel& p, double radius, double min_amplitude, Vec2& e1, Vec2& e2) {
  std::array<double, kRingSamples> f{};
  for (int k = 0; k < kRingSamples; ++k) {
    const double a = 2.0 * std::numbers::pi * k / kRingSamples;
    f[k] = sample_bilinear(s, p.x() + radius * std::cos(a), p.y() + radius * std::sin(a));
  }
  const auto [mn, mx] = std::minmax_element(f.begin(), f.end());
  const double amp = *mx - *mn;
  if (amp < min_amplitude) return false;
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= kRingSamples;
  for (int k = 0; k < kRingSamples / 2; ++k) {
    if (std::abs(f[k] - f[k + kRingSamples / 2]) > 0.35 * amp) return false;
  }
  std::vector<double> crossings;
  for (int k = 0; k < kRingSamples; ++k) {
    const double a = f[k] - mean;
    const double b = f[(k + 1) % kRingSamples] - mean;
    if ((a < 0.0) != (b < 0.0)) {
      const double frac = a / (a - b);
      crossings.push_back(2.0 * std::numbers::pi * (k + frac) / kRingSamples);
    }
  }
  if (crossings.size() != 4) return false;
  e1 = Vec2(std::cos(crossings[0]), std::sin(crossings[0]));
  e2 = Vec2(std::cos(crossings[1]), std::sin(crossings[1]));
  return true;
}

struct GridPoint {
  int candidate;
  Vec2 step_i;
  Vec2 step_j;
};

using GridKey = std::pair<int, int>;

// Grows a lattice from one seed by predicting neighbor positions.
std::map<GridKey, GridPoint> grow_grid(const std::vector<Candidate>& cands, int seed) {
  std::map<GridKey, GridPoint> grid;
  const Candidate& s = cands[seed];
  const double cone = std::cos(20.0 * std::numbers::pi / 180.0);

  auto nearest_along = [&](const Pixel& p, const Vec2& dir, int exclude) {
    int best = -1;
    double best_d = 1e300;
    for (int k = 0; k < static_cast<int>(cands.size()); ++k) {
      if (k == exclude) continue;
      const Vec2 d = cands[k].p - p;
      const double n = d.norm();
      if (n < 1e-9 || d.dot(dir) < cone * n) continue;
      if (n < best_d) {
        best_d = n;
        best = k;
      }
    }
    return best;
  };
  auto seed_step = [&](const Vec2& e) -> std::optional<Vec2> {
    const int fwd = nearest_along(s.p, e, seed);
    const int bwd = nearest_along(s.p, -e, seed);
    if (fwd >= 0 && (bwd < 0 || (cands[fwd].p - s.p).norm() <= (cands[bwd].p - s.p).norm())) {
      return Vec2(cands[fwd].p - s.p);
    }
    if (bwd >= 0) return Vec2(s.p - cands[bwd].p);
    return std::nullopt;
  };
  const auto si = seed_step(s.e1);
  const auto sj = seed_step(s.e2);
  if (!si || !sj) return grid;

  std::vector<bool> used(cands.size(), false);
  grid[{0, 0}] = {seed, *si, *sj};
  used[seed] = true;
  std::queue<GridKey> queue;
  queue.push({0, 0});
  const std::array<GridKey, 4> offsets = {GridKey{1, 0}, GridKey{-1, 0}, GridKey{0, 1}, GridKey{0, -1}};
  while (!queue.empty()) {
    const GridKey key = queue.front();
    queue.pop();
    const GridPoint gp = grid.at(key);
    const Pixel p = cands[gp.candidate].p;
    for (const auto& [di, dj] : offsets) {
      const GridKey nk{key.first + di, key.second + dj};
      if (grid.count(nk)) continue;
      Vec2 step = di != 0 ? Vec2(di * gp.step_i) : Vec2(dj * gp.step_j);
      const auto opp = grid.find({key.first - di, key.second - dj});
      if (opp != grid.end()) step = p - cands[opp->second.candidate].p;
      const Pixel pred = p + step;
      const double tol = 0.35 * step.norm();
      int best = -1;
      double best_d = tol;
      for (int k = 0; k < static_cast<int>(cands.size()); ++k) {
        if (used[k]) continue;
        const double d = (cands[k].p - pred).norm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (best < 0) continue;
      GridPoint np = gp;
      np.candidate = best;
      const Vec2 actual = cands[best].p - p;
      if (di != 0) np.step_i = di * actual;
      else np.step_j = dj * actual;
      grid[nk] = np;
      used[best] = true;
      queue.push(nk);
    }
  }
  return grid;
}

}  // namespace

int detection_channel(const Vec3& laser_color) {
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (laser_color[c] < laser_color[best]) best = c;
  }
  return best;
}

Pixel refine_saddle(const Image& smoothed, const Pixel& start, int half_window) {
  Pixel p = start;
  const int n = 2 * half_window + 1;
  Eigen::MatrixXd A(n * n, 6);
  Eigen::VectorXd b(n * n);
  for (int iter = 0; iter < 20; ++iter) {
    int row = 0;
    for (int dy = -half_window; dy <= half_window; ++dy) {
      for (int dx = -half_window; dx <= half_window; ++dx, ++row) {
        A.row(row) << dx * dx, dx * dy, dy * dy, dx, dy, 1.0;
        b(row) = sample_bilinear(smoothed, p.x() + dx, p.y() + dy);
      }
    }
    const Eigen::VectorXd q = A.colPivHouseholderQr().solve(b);
    Eigen::Matrix2d H;
    H << 2 * q(0), q(1), q(1), 2 * q(2);
    if (!(H.determinant() < 0.0)) return start;
    const Vec2 shift = H.inverse() * -Vec2(q(3), q(4));
    if (!shift.allFinite() || shift.norm() > 1.5 * half_window) return start;
    p += shift;
    if ((p - start).norm() > 2.0) return start;
    if (shift.norm() < 1e-4) break;
  }
  return p;
}

CornerDetection detect_checkerboard(const Image& gray, const CheckerboardSpec& spec,
                                    const CornerDetectorOptions& options) {
  CornerDetection out;
  const Image s = gaussian_blur(gray, options.smoothing_sigma);
  const int w = s.width();
  const int h = s.height();
  Image response(w, h, 1);
  double max_r = 0.0;
  double max_i = 0.0;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const double ixx = s.at(x + 1, y) - 2 * s.at(x, y) + s.at(x - 1, y);
      const double iyy = s.at(x, y + 1) - 2 * s.at(x, y) + s.at(x, y - 1);
      const double ixy = 0.25 * (s.at(x + 1, y + 1) - s.at(x + 1, y - 1) - s.at(x - 1, y + 1) + s.at(x - 1, y - 1));
      const double r = ixy * ixy - ixx * iyy;
      response.at(x, y) = r;
      max_r = std::max(max_r, r);
      max_i = std::max(max_i, s.at(x, y));
    }
  }
  if (!(max_r > 0.0)) {
    out.failure = "no saddle response";
    return out;
  }

  std::vector<Candidate> cands;
  const int margin = static_cast<int>(std::ceil(options.ring_radius)) + 2;
  const int r = options.nms_radius;
  for (int y = margin; y < h - margin; ++y) {
    for (int x = margin; x < w - margin; ++x) {
      const double v = response.at(x, y);
      if (v < options.response_threshold * max_r) continue;
      bool is_max = true;
      for (int dy = -r; dy <= r && is_max; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = std::clamp(x + dx, 0, w - 1);
          const int yy = std::clamp(y + dy, 0, h - 1);
          const double o = response.at(xx, yy);
          // Strict on earlier pixels so plateaus keep exactly one maximum.
          if (o > v || (o == v && (dy < 0 || (dy == 0 && dx < 0)))) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      Candidate c{Pixel(x, y), v, Vec2::Zero(), Vec2::Zero()};
      c.p = refine_saddle(s, c.p, options.refine_half_window);
      if (!ring_test(s, c.p, options.ring_radius, options.min_contrast * max_i, c.e1, c.e2)) continue;
      bool duplicate = false;
      for (auto& o : cands) {
        if ((o.p - c.p).norm() < 2.0) {
          duplicate = true;
          if (c.response > o.response) o = c;
          break;
        }
      }
      if (!duplicate) cands.push_back(c);
    }
  }
  for (const auto& c : cands) out.candidates.push_back(c.p);
  if (static_cast<int>(cands.size()) < spec.corner_count()) {
    out.failure = "found " + std::to_string(cands.size()) + " junctions, need " +
                  std::to_string(spec.corner_count());
    return out;
  }

  std::vector<int> order(cands.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cands[a].response > cands[b].response; });

  const int tries = std::min<int>(options.max_seeds, static_cast<int>(order.size()));
  for (int t = 0; t < tries; ++t) {
    const auto grid = grow_grid(cands, order[t]);
    if (static_cast<int>(grid.size()) != spec.corner_count()) continue;
    int i0 = 1 << 30, i1 = -(1 << 30), j0 = 1 << 30, j1 = -(1 << 30);
    for (const auto& [k, _] : grid) {
      i0 = std::min(i0, k.first);
      i1 = std::max(i1, k.first);
      j0 = std::min(j0, k.second);
      j1 = std::max(j1, k.second);
    }
    const int ni = i1 - i0 + 1;
    const int nj = j1 - j0 + 1;
    if (ni * nj != spec.corner_count()) continue;

    auto at = [&](int i, int j) { return cands[grid.at({i + i0, j + j0}).candidate].p; };
    // Axis of the lattice that carries the board columns.
    bool i_is_x;
    if (ni == spec.inner_cols && nj == spec.inner_rows && ni != nj) {
      i_is_x = true;
    } else if (ni == spec.inner_rows && nj == spec.inner_cols && ni != nj) {
      i_is_x = false;
    } else if (ni == nj && ni == spec.inner_cols) {
      i_is_x = std::abs((at(ni - 1, 0) - at(0, 0)).x()) >= std::abs((at(0, nj - 1) - at(0, 0)).x());
    } else {
      continue;
    }
    const int nx = i_is_x ? ni : nj;
    const int ny = i_is_x ? nj : ni;
    auto lattice = [&](int x, int y) { return i_is_x ? at(x, y) : at(y, x); };
    const bool flip_x = (lattice(nx - 1, 0) - lattice(0, 0)).x() + (lattice(nx - 1, ny - 1) - lattice(0, ny - 1)).x() < 0.0;
    auto oriented_x = [&](int x, int y) { return lattice(flip_x ? nx - 1 - x : x, y); };
    const Vec2 sx = oriented_x(nx - 1, 0) - oriented_x(0, 0);
    const Vec2 sy = oriented_x(0, ny - 1) - oriented_x(0, 0);
    const bool flip_y = sx.x() * sy.y() - sx.y() * sy.x() < 0.0;

    out.corners.clear();
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) out.corners.push_back(oriented_x(x, flip_y ? ny - 1 - y : y));
    }
    out.found = true;
    out.failure.clear();
    return out;
  }
  out.failure = "no complete " + std::to_string(spec.inner_cols) + "x" + std::to_string(spec.inner_rows) +
                " lattice among " + std::to_string(cands.size()) + " junctions";
  return out;
}

}  // namespace vlscan
