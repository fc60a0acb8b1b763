#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "vlscan/camera.hpp"
#include "vlscan/geom.hpp"
#include "vlscan/laser.hpp"

namespace vlscan {

struct CheckerboardSpec {
  int inner_cols = 12;  // inner corners; the pattern has inner_cols + 1 squares
  int inner_rows = 8;
  double square_size = 0.025;
  double sheet_w = 0.4;
  double sheet_h = 0.3;
  double saturation = 0.7;  // 1 gives black squares, 0 removes the pattern

  int corner_count() const { return inner_cols * inner_rows; }
  double pattern_w() const { return (inner_cols + 1) * square_size; }
  double pattern_h() const { return (inner_rows + 1) * square_size; }
  void validate() const;
};

// Procedural checkerboard evaluated in board-frame meters, pattern centered
// on the origin. Outside the pattern the sheet is plain white.
struct CheckerTexture {
  CheckerboardSpec spec;

  // Factor applied to the material albedo at board coordinates (x, y).
  double shade(const Vec2& uv) const;
};

struct Material {
  Vec3 albedo{0.8, 0.8, 0.8};
  double specular_weight = 0.0;
  double roughness = 0.5;
  std::optional<CheckerTexture> checker;

  Vec3 albedo_at(const Vec2& uv) const {
    return checker ? Vec3(albedo * checker->shade(uv)) : albedo;
  }
  void validate() const;
};

enum class Shading { kFlat, kSmooth };

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> material_ids;  // one per triangle, index into Scene::materials
  std::vector<Vec2> uvs;          // optional, one per vertex
  std::vector<Vec3> vertex_normals;  // filled by finalize() for smooth meshes
  Shading shading = Shading::kFlat;

  // Checks indices and triangle areas and computes vertex normals.
  void finalize();
  void set_material(int id) { material_ids.assign(triangles.size(), id); }
  TriMesh transformed(const Pose& pose) const;
};

struct PointLight {
  Vec3 position = Vec3::Zero();
  double intensity = 1.0;  // irradiance at 1 m, normal incidence
  Vec3 color{1.0, 1.0, 1.0};
};

struct Scene {
  std::vector<TriMesh> meshes;
  std::vector<Material> materials;
  double ambient_light = 0.0;
  Vec3 background = Vec3::Zero();
  std::vector<PointLight> point_lights;
  LaserModel laser;
  CameraRig camera;
  bool laser_enabled = true;

  // Appends the material and assigns it to every triangle of the mesh.
  int add_mesh(TriMesh mesh, const Material& material);
  bool has_specular() const;
};

struct CheckerboardFragment {
  TriMesh mesh;
  Material material;
  std::vector<Vec3> corners;  // world coordinates, row-major
};

// Textured board quad in the board frame's z = 0 plane placed by board_pose,
// together with the world positions of its inner corners.
CheckerboardFragment checkerboard_scene(const CheckerboardSpec& spec, const Pose& board_pose,
                                        const Vec3& albedo = Vec3(0.8, 0.8, 0.8));

// Inner corners in the board frame, row-major, z = 0.
std::vector<Vec3> checkerboard_corners(const CheckerboardSpec& spec);

// Quad of size w x h centered on the origin of its local z = 0 plane. The UVs
// are the local x, y coordinates.
TriMesh make_quad(double w, double h, const Pose& pose = {});

TriMesh make_icosphere(double radius, int subdivisions, Shading shading, const Pose& pose = {});

// Open V-groove prism: two flat shoulders at local z = 0 and two groove faces
// meeting at depth `depth` along the local x axis.
struct VGrooveSpec {
  double length = 0.3;
  double shoulder_width = 0.08;
  double opening = 0.04;
  double depth = 0.03;
};
TriMesh make_v_groove(const VGrooveSpec& spec, const Pose& pose = {});

struct Hit {
  double t = 0.0;
  Vec3 point;
  Vec3 geometric_normal;  // face normal, oriented against the ray
  Vec3 shading_normal;    // interpolated for smooth meshes, same side as geometric
  Vec2 uv = Vec2::Zero();
  int material = -1;
  int triangle = -1;      // global index across all meshes
  int mesh = -1;
};

inline constexpr double kRayTMin = 1e-6;

// Bounding volume hierarchy over every triangle of a mesh set. Immutable after
// construction; queries are thread-safe. Nearest-hit ties go to the lowest
// global triangle index.
class Accel {
 public:
  Accel() = default;
  explicit Accel(const std::vector<TriMesh>& meshes);

  std::optional<Hit> intersect(const Line3& ray, double t_min = kRayTMin,
                               double t_max = 1e30) const;
  // Exhaustive reference query with the same tie-break.
  std::optional<Hit> intersect_brute_force(const Line3& ray, double t_min = kRayTMin,
                                           double t_max = 1e30) const;
  // Any hit in (t_min, t_max) along the normalized direction.
  bool occluded(const Vec3& origin, const Vec3& dir, double t_max) const;

  std::size_t triangle_count() const { return tris_.size(); }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Tri {
    Vec3 v0, v1, v2;
    int mesh;
    int local;
  };
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1;   // interior: child indices
    int right = -1;
    int first = 0;   // leaf: range into order_
    int count = 0;
  };

  int build(int first, int count, int depth);
  Hit make_hit(int global, double t, double b0, double b1, double b2, const Line3& ray) const;

  std::vector<TriMesh> meshes_;
  std::vector<Tri> tris_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

std::optional<Hit> intersect_ray(const Accel& accel, const Line3& ray);

}  // namespace vlscan
