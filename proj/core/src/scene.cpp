#include "vlscan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "vlscan/error.hpp"

namespace vlscan {

void CheckerboardSpec::validate() const {
  if (inner_cols < 2 || inner_rows < 2 || !(square_size > 0.0)) {
    throw Error(ErrorCode::kConfigError, "checkerboard needs >= 2x2 inner corners and a positive square size");
  }
  if (sheet_w < pattern_w() || sheet_h < pattern_h()) {
    throw Error(ErrorCode::kConfigError, "checkerboard sheet is smaller than its pattern");
  }
  if (!(saturation >= 0.0 && saturation <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "checkerboard saturation must be in [0, 1]");
  }
}

double CheckerTexture::shade(const Vec2& uv) const {
  const double half_w = 0.5 * spec.pattern_w();
  const double half_h = 0.5 * spec.pattern_h();
  if (std::abs(uv.x()) > half_w || std::abs(uv.y()) > half_h) return 1.0;
  int p = static_cast<int>(std::floor((uv.x() + half_w) / spec.square_size));
  int q = static_cast<int>(std::floor((uv.y() + half_h) / spec.square_size));
  p = std::clamp(p, 0, spec.inner_cols);
  q = std::clamp(q, 0, spec.inner_rows);
  return (p + q) % 2 == 0 ? 1.0 - spec.saturation : 1.0;
}

void Material::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(specular_weight) || !unit(roughness) || !unit(albedo.x()) || !unit(albedo.y()) ||
      !unit(albedo.z())) {
    throw Error(ErrorCode::kConfigError, "material weights and albedo must be in [0, 1]");
  }
}

void TriMesh::finalize() {
  const int nv = static_cast<int>(vertices.size());
  if (material_ids.empty()) material_ids.assign(triangles.size(), 0);
  if (material_ids.size() != triangles.size()) {
    throw Error(ErrorCode::kConfigError, "mesh needs one material id per triangle");
  }
  if (!uvs.empty() && uvs.size() != vertices.size()) {
    throw Error(ErrorCode::kConfigError, "mesh uvs must match the vertex count");
  }
  vertex_normals.assign(vertices.size(), Vec3::Zero());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& tri = triangles[i];
    for (int idx : tri) {
      if (idx < 0 || idx >= nv) {
        throw Error(ErrorCode::kConfigError, "triangle " + std::to_string(i) + " has an index out of range");
      }
    }
    const Vec3 cross = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
    if (!(0.5 * cross.norm() > 1e-12)) {
      throw Error(ErrorCode::kConfigError, "triangle " + std::to_string(i) + " is degenerate");
    }
    // Area weighted.
    for (int idx : tri) vertex_normals[idx] += cross;
  }
  for (auto& n : vertex_normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
}

TriMesh TriMesh::transformed(const Pose& pose) const {
  TriMesh out = *this;
  for (auto& v : out.vertices) v = pose.apply(v);
  for (auto& n : out.vertex_normals) n = pose.rotate(n);
  return out;
}

int Scene::add_mesh(TriMesh mesh, const Material& material) {
  material.validate();
  materials.push_back(material);
  const int id = static_cast<int>(materials.size()) - 1;
  mesh.set_material(id);
  mesh.finalize();
  meshes.push_back(std::move(mesh));
  return id;
}

bool Scene::has_specular() const {
  return std::any_of(materials.begin(), materials.end(),
                     [](const Material& m) { return m.specular_weight > 0.0; });
}

std::vector<Vec3> checkerboard_corners(const CheckerboardSpec& spec) {
  std::vector<Vec3> corners;
  corners.reserve(spec.corner_count());
  const double x0 = -0.5 * (spec.inner_cols - 1) * spec.square_size;
  const double y0 = -0.5 * (spec.inner_rows - 1) * spec.square_size;
  for (int j = 0; j < spec.inner_rows; ++j) {
    for (int i = 0; i < spec.inner_cols; ++i) {
      corners.emplace_back(x0 + i * spec.square_size, y0 + j * spec.square_size, 0.0);
    }
  }
  return corners;
}

CheckerboardFragment checkerboard_scene(const CheckerboardSpec& spec, const Pose& board_pose,
                                        const Vec3& albedo) {
  spec.validate();
  CheckerboardFragment out;
  out.mesh = make_quad(spec.sheet_w, spec.sheet_h, board_pose);
  out.material.albedo = albedo;
  out.material.checker = CheckerTexture{spec};
  for (const Vec3& c : checkerboard_corners(spec)) out.corners.push_back(board_pose.apply(c));
  return out;
}

TriMesh make_quad(double w, double h, const Pose& pose) {
  TriMesh mesh;
  const double hw = 0.5 * w;
  const double hh = 0.5 * h;
  const std::array<Vec2, 4> local = {Vec2(-hw, -hh), Vec2(hw, -hh), Vec2(hw, hh), Vec2(-hw, hh)};
  for (const Vec2& p : local) {
    mesh.vertices.push_back(pose.apply(Vec3(p.x(), p.y(), 0.0)));
    mesh.uvs.push_back(p);
  }
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  mesh.finalize();
  return mesh;
}

TriMesh make_icosphere(double radius, int subdivisions, Shading shading, const Pose& pose) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0},
                         {0, -1, g}, {0, 1, g}, {0, -1, -g}, {0, 1, -g},
                         {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoints;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& t : f) {
      const int a = midpoint(t[0], t[1]);
      const int b = midpoint(t[1], t[2]);
      const int c = midpoint(t[2], t[0]);
      next.push_back({t[0], a, c});
      next.push_back({t[1], b, a});
      next.push_back({t[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  TriMesh mesh;
  mesh.shading = shading;
  for (const auto& p : v) mesh.vertices.push_back(pose.apply(radius * p));
  mesh.triangles = std::move(f);
  mesh.finalize();
  return mesh;
}

TriMesh make_v_groove(const VGrooveSpec& spec, const Pose& pose) {
  if (!(spec.length > 0.0 && spec.shoulder_width >= 0.0 && spec.opening > 0.0 && spec.depth > 0.0)) {
    throw Error(ErrorCode::kConfigError, "v-groove dimensions must be positive");
  }
  const double half = 0.5 * spec.opening;
  std::vector<Vec2> profile = {{-half - spec.shoulder_width, 0.0}, {-half, 0.0}, {0.0, spec.depth},
                               {half, 0.0}, {half + spec.shoulder_width, 0.0}};
  if (spec.shoulder_width == 0.0) profile = {profile[1], profile[2], profile[3]};
  TriMesh mesh;
  const double x0 = -0.5 * spec.length;
  const double x1 = 0.5 * spec.length;
  for (const Vec2& p : profile) {
    mesh.vertices.push_back(pose.apply(Vec3(x0, p.x(), p.y())));
    mesh.vertices.push_back(pose.apply(Vec3(x1, p.x(), p.y())));
    mesh.uvs.emplace_back(x0, p.x());
    mesh.uvs.emplace_back(x1, p.x());
  }
  for (int k = 0; k + 1 < static_cast<int>(profile.size()); ++k) {
    const int a = 2 * k;
    mesh.triangles.push_back({a, a + 1, a + 3});
    mesh.triangles.push_back({a, a + 3, a + 2});
  }
  mesh.finalize();
  return mesh;
}

namespace {

struct TriHit {
  double t;
  double b0, b1, b2;
};

// Watertight ray/triangle test (Woop, Benthin, Wald 2013): shared edges are
// never missed by both neighbours.
struct RayPrecomp {
  int kx, ky, kz;
  double sx, sy, sz;
  Vec3 org;
  Vec3 inv;

  explicit RayPrecomp(const Line3& ray) : org(ray.l0) {
    const Vec3& d = ray.v;
    Vec3 a = d.cwiseAbs();
    kz = a.x() > a.y() ? (a.x() > a.z() ? 0 : 2) : (a.y() > a.z() ? 1 : 2);
    kx = (kz + 1) % 3;
    ky = (kx + 1) % 3;
    if (d[kz] < 0.0) std::swap(kx, ky);
    sx = d[kx] / d[kz];
    sy = d[ky] / d[kz];
    sz = 1.0 / d[kz];
    inv = d.cwiseInverse();
  }
};

std::optional<TriHit> intersect_triangle(const RayPrecomp& r, const Vec3& v0, const Vec3& v1,
                                         const Vec3& v2) {
  const Vec3 A = v0 - r.org;
  const Vec3 B = v1 - r.org;
  const Vec3 C = v2 - r.org;
  const double ax = A[r.kx] - r.sx * A[r.kz];
  const double ay = A[r.ky] - r.sy * A[r.kz];
  const double bx = B[r.kx] - r.sx * B[r.kz];
  const double by = B[r.ky] - r.sy * B[r.kz];
  const double cx = C[r.kx] - r.sx * C[r.kz];
  const double cy = C[r.ky] - r.sy * C[r.kz];
  const double U = cx * by - cy * bx;
  const double V = ax * cy - ay * cx;
  const double W = bx * ay - by * ax;
  if ((U < 0.0 || V < 0.0 || W < 0.0) && (U > 0.0 || V > 0.0 || W > 0.0)) return std::nullopt;
  const double det = U + V + W;
  if (det == 0.0) return std::nullopt;
  const double T = U * r.sz * A[r.kz] + V * r.sz * B[r.kz] + W * r.sz * C[r.kz];
  const double inv_det = 1.0 / det;
  return TriHit{T * inv_det, U * inv_det, V * inv_det, W * inv_det};
}

bool hit_box(const Eigen::AlignedBox3d& box, const RayPrecomp& r, double t_min, double t_max,
             double& entry) {
  for (int a = 0; a < 3; ++a) {
    double t0 = (box.min()[a] - r.org[a]) * r.inv[a];
    double t1 = (box.max()[a] - r.org[a]) * r.inv[a];
    if (t0 > t1) std::swap(t0, t1);
    // 0 * inf when the origin lies on a slab of a parallel ray.
    if (std::isnan(t0)) t0 = -std::numeric_limits<double>::infinity();
    if (std::isnan(t1)) t1 = std::numeric_limits<double>::infinity();
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_min > t_max) return false;
  }
  entry = t_min;
  return true;
}

double tie_width(double t) { return 1e-12 * (1.0 + std::abs(t)); }

// Nearest first; near-equal distances resolved by the lower triangle index.
bool better(double t, int idx, double best_t, int best_idx) {
  if (best_idx < 0) return true;
  if (t < best_t - tie_width(best_t)) return true;
  if (t > best_t + tie_width(best_t)) return false;
  return idx < best_idx;
}

constexpr int kLeafSize = 4;

}  // namespace

Accel::Accel(const std::vector<TriMesh>& meshes) : meshes_(meshes) {
  for (int m = 0; m < static_cast<int>(meshes_.size()); ++m) {
    const TriMesh& mesh = meshes_[m];
    for (int i = 0; i < static_cast<int>(mesh.triangles.size()); ++i) {
      const auto& t = mesh.triangles[i];
      tris_.push_back({mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], m, i});
    }
  }
  order_.resize(tris_.size());
  for (int i = 0; i < static_cast<int>(order_.size()); ++i) order_[i] = i;
  if (!tris_.empty()) {
    nodes_.reserve(2 * tris_.size() / kLeafSize + 2);
    build(0, static_cast<int>(tris_.size()), 0);
  }
}

int Accel::build(int first, int count, int depth) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroids;
  for (int i = first; i < first + count; ++i) {
    const Tri& t = tris_[order_[i]];
    box.extend(t.v0).extend(t.v1).extend(t.v2);
    centroids.extend((t.v0 + t.v1 + t.v2) / 3.0);
  }
  const double pad = 1e-9 * (1.0 + box.diagonal().norm());
  box.min().array() -= pad;
  box.max().array() += pad;
  nodes_[index].box = box;

  if (count <= kLeafSize || depth > 48) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  int axis = 0;
  centroids.diagonal().maxCoeff(&axis);
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](int a, int b) {
                     const double ca = tris_[a].v0[axis] + tris_[a].v1[axis] + tris_[a].v2[axis];
                     const double cb = tris_[b].v0[axis] + tris_[b].v1[axis] + tris_[b].v2[axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const int left = build(first, mid - first, depth + 1);
  const int right = build(mid, first + count - mid, depth + 1);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

Hit Accel::make_hit(int global, double t, double b0, double b1, double b2, const Line3& ray) const {
  const Tri& tri = tris_[global];
  const TriMesh& mesh = meshes_[tri.mesh];
  const auto& idx = mesh.triangles[tri.local];
  Hit hit;
  hit.t = t;
  hit.point = ray.at(t);
  hit.triangle = global;
  hit.mesh = tri.mesh;
  hit.material = mesh.material_ids[tri.local];
  Vec3 n = (tri.v1 - tri.v0).cross(tri.v2 - tri.v0).normalized();
  if (n.dot(ray.v) > 0.0) n = -n;
  hit.geometric_normal = n;
  hit.shading_normal = n;
  if (mesh.shading == Shading::kSmooth) {
    Vec3 s = b0 * mesh.vertex_normals[idx[0]] + b1 * mesh.vertex_normals[idx[1]] +
             b2 * mesh.vertex_normals[idx[2]];
    if (s.norm() > 0.0) {
      s.normalize();
      hit.shading_normal = s.dot(n) < 0.0 ? Vec3(-s) : s;
    }
  }
  if (!mesh.uvs.empty()) {
    hit.uv = b0 * mesh.uvs[idx[0]] + b1 * mesh.uvs[idx[1]] + b2 * mesh.uvs[idx[2]];
  }
  return hit;
}

std::optional<Hit> Accel::intersect(const Line3& ray_in, double t_min, double t_max) const {
  if (nodes_.empty()) return std::nullopt;
  const double len = ray_in.v.norm();
  const Line3 ray{ray_in.l0, ray_in.v / len};
  const RayPrecomp pre(ray);
  int best = -1;
  TriHit best_hit{t_max, 0, 0, 0};

  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double entry = 0.0;
    const double limit = best < 0 ? t_max : best_hit.t + tie_width(best_hit.t);
    if (!hit_box(node.box, pre, t_min, limit, entry)) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int g = order_[i];
        const Tri& tri = tris_[g];
        auto h = intersect_triangle(pre, tri.v0, tri.v1, tri.v2);
        if (!h || !(h->t > t_min) || !(h->t < t_max)) continue;
        if (better(h->t, g, best_hit.t, best)) {
          best = g;
          best_hit = *h;
        }
      }
      continue;
    }
    // Push the farther child first so the nearer one is visited first.
    double el = 0.0, er = 0.0;
    const bool hl = hit_box(nodes_[node.left].box, pre, t_min, limit, el);
    const bool hr = hit_box(nodes_[node.right].box, pre, t_min, limit, er);
    if (hl && hr) {
      if (el <= er) {
        stack[top++] = node.right;
        stack[top++] = node.left;
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    } else if (hl) {
      stack[top++] = node.left;
    } else if (hr) {
      stack[top++] = node.right;
    }
  }
  if (best < 0) return std::nullopt;
  return make_hit(best, best_hit.t, best_hit.b0, best_hit.b1, best_hit.b2, ray);
}

std::optional<Hit> Accel::intersect_brute_force(const Line3& ray_in, double t_min,
                                                double t_max) const {
  const Line3 ray{ray_in.l0, ray_in.v.normalized()};
  const RayPrecomp pre(ray);
  int best = -1;
  TriHit best_hit{t_max, 0, 0, 0};
  for (int g = 0; g < static_cast<int>(tris_.size()); ++g) {
    const Tri& tri = tris_[g];
    auto h = intersect_triangle(pre, tri.v0, tri.v1, tri.v2);
    if (!h || !(h->t > t_min) || !(h->t < t_max)) continue;
    if (better(h->t, g, best_hit.t, best)) {
      best = g;
      best_hit = *h;
    }
  }
  if (best < 0) return std::nullopt;
  return make_hit(best, best_hit.t, best_hit.b0, best_hit.b1, best_hit.b2, ray);
}

bool Accel::occluded(const Vec3& origin, const Vec3& dir, double t_max) const {
  if (nodes_.empty()) return false;
  const RayPrecomp pre(Line3{origin, dir});
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double entry = 0.0;
    if (!hit_box(node.box, pre, kRayTMin, t_max, entry)) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const Tri& tri = tris_[order_[i]];
        auto h = intersect_triangle(pre, tri.v0, tri.v1, tri.v2);
        if (h && h->t > kRayTMin && h->t < t_max) return true;
      }
      continue;
    }
    stack[top++] = node.left;
    stack[top++] = node.right;
  }
  return false;
}

std::optional<Hit> intersect_ray(const Accel& accel, const Line3& ray) {
  return accel.intersect(ray);
}

}  // namespace vlscan
