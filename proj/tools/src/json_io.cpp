#include "json_io.hpp"

#include <fstream>

#include "vlscan/error.hpp"
#include "vlscan/io.hpp"

namespace vlscan::app {

Json load_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfigError, (path.empty() ? std::string("/") : path) + ": " + what);
}

ObjectReader::ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) config_error(path_, "expected an object");
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key); }

const Json& ObjectReader::raw(const std::string& key) {
  if (!j_.contains(key)) config_error(path_of(key), "missing required key");
  used_.insert(key);
  return j_.at(key);
}

double ObjectReader::number(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

double ObjectReader::number(const std::string& key) {
  const Json& v = raw(key);
  if (!v.is_number()) config_error(path_of(key), "expected a number");
  return v.get<double>();
}

int ObjectReader::integer(const std::string& key, int fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_number_integer()) config_error(path_of(key), "expected an integer");
  return v.get<int>();
}

std::uint64_t ObjectReader::uint64(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    config_error(path_of(key), "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool ObjectReader::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_boolean()) config_error(path_of(key), "expected true or false");
  return v.get<bool>();
}

std::string ObjectReader::string(const std::string& key, const std::string& fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_string()) config_error(path_of(key), "expected a string");
  return v.get<std::string>();
}

Vec3 ObjectReader::vec3(const std::string& key, const Vec3& fallback) { return has(key) ? vec3(key) : fallback; }

Vec3 ObjectReader::vec3(const std::string& key) { return vec3_from(raw(key), path_of(key)); }

ObjectReader ObjectReader::object(const std::string& key) { return ObjectReader(raw(key), path_of(key)); }

void ObjectReader::finish() const {
  for (const auto& [key, _] : j_.items()) {
    if (key != "notes" && !used_.count(key)) config_error(path_of(key), "unknown key");
  }
}

Vec3 vec3_from(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) config_error(path, "expected an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) config_error(path + "/" + std::to_string(i), "expected a number");
    v[i] = j[i].get<double>();
  }
  return v;
}

namespace {

template <int N>
Eigen::Matrix<double, N, N> matrix_from(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != N) config_error(path, "expected a row-major " + std::to_string(N) + "x" + std::to_string(N) + " array");
  Eigen::Matrix<double, N, N> m;
  for (int r = 0; r < N; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || row.size() != N) config_error(path + "/" + std::to_string(r), "expected a row of " + std::to_string(N));
    for (int c = 0; c < N; ++c) {
      if (!row[c].is_number()) config_error(path + "/" + std::to_string(r) + "/" + std::to_string(c), "expected a number");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

template <typename M>
Json matrix_to_json(const M& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

}  // namespace

Mat3 mat3_from(const Json& j, const std::string& path) { return matrix_from<3>(j, path); }
Mat4 mat4_from(const Json& j, const std::string& path) { return matrix_from<4>(j, path); }

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json to_json(const Mat3& m) { return matrix_to_json(m); }
Json to_json(const Mat4& m) { return matrix_to_json(m); }

Json to_json(const Intrinsics& K) {
  return {{"fx", K.fx}, {"fy", K.fy}, {"s", K.s}, {"cx", K.cx}, {"cy", K.cy}, {"width", K.width}, {"height", K.height}};
}

Json to_json(const Distortion& d) {
  return {{"k1", d.k1}, {"k2", d.k2}, {"p1", d.p1}, {"p2", d.p2}, {"k3", d.k3}};
}

Json to_json(const Pose& p) { return {{"R", to_json(p.R)}, {"t", to_json(p.t)}}; }

Json to_json(const PlaneParams& p) { return Json::array({p.a, p.b, p.c, p.d}); }

Json to_json(const LaserModel& l) {
  return {{"pose", to_json(l.pose_wl)},
          {"color", to_json(l.color)},
          {"power_mw", l.power_mw},
          {"divergence_angle", l.divergence_angle},
          {"cone_angle", l.cone_angle},
          {"intensity_scale", l.intensity_scale}};
}

Json to_json(const CheckerboardSpec& s) {
  return {{"inner_cols", s.inner_cols}, {"inner_rows", s.inner_rows}, {"square_size", s.square_size},
          {"sheet_w", s.sheet_w},       {"sheet_h", s.sheet_h},       {"saturation", s.saturation}};
}

Json to_json(const LMReport& r) {
  return {{"iterations", r.iterations},
          {"evaluations", r.evaluations},
          {"initial_cost", r.initial_cost},
          {"final_cost", r.final_cost},
          {"gradient_norm", r.gradient_norm},
          {"termination", std::string(to_string(r.termination))}};
}

Json to_json(const LaserProfile& p) {
  Json rows = Json::array();
  for (const ProfileRow& r : p.rows) {
    rows.push_back({{"row", r.row},
                    {"col", r.col},
                    {"amplitude", r.amplitude},
                    {"sigma", r.sigma},
                    {"valid", r.valid()},
                    {"reason", std::string(to_string(r.status))},
                    {"multi_peak", r.multi_peak},
                    {"candidates", r.candidates}});
  }
  return {{"width", p.width}, {"height", p.height}, {"transposed", p.transposed}, {"rows", rows}};
}

Json to_json(const EvalReport& r, bool with_entries) {
  Json out = {{"count", r.entries.size()}, {"rms", r.rms},   {"mean", r.mean},
              {"mean_abs", r.mean_abs},    {"max_abs", r.max_abs},
              {"mean_direction", to_json(r.mean_direction)}};
  if (with_entries) {
    Json e = Json::array();
    for (const EvalEntry& x : r.entries) {
      e.push_back({{"frame", x.frame}, {"row", x.row}, {"estimate", to_json(x.estimate)},
                   {"truth", to_json(x.truth)}, {"z_error", x.z_error}});
    }
    out["entries"] = e;
  }
  return out;
}

Intrinsics intrinsics_from(ObjectReader r) {
  Intrinsics K;
  K.fx = r.number("fx");
  K.fy = r.number("fy");
  K.s = r.number("s", 0.0);
  K.cx = r.number("cx");
  K.cy = r.number("cy");
  K.width = r.integer("width", 0);
  K.height = r.integer("height", 0);
  r.finish();
  try {
    K.validate();
  } catch (const Error& e) {
    config_error(r.path(), e.what());
  }
  return K;
}

Distortion distortion_from(ObjectReader r) {
  Distortion d;
  d.k1 = r.number("k1", 0.0);
  d.k2 = r.number("k2", 0.0);
  d.p1 = r.number("p1", 0.0);
  d.p2 = r.number("p2", 0.0);
  d.k3 = r.number("k3", 0.0);
  r.finish();
  return d;
}

Pose pose_from(ObjectReader r) {
  Pose p;
  if (r.has("R") && r.has("axis_angle")) config_error(r.path(), "give either R or axis_angle");
  if (r.has("R")) {
    p.R = mat3_from(r.raw("R"), r.path_of("R"));
    if (orthonormality_error(p.R) > 1e-6) config_error(r.path_of("R"), "not a rotation matrix");
  } else if (r.has("axis_angle")) {
    p.R = rotation_exp(r.vec3("axis_angle"));
  }
  p.t = r.vec3("t", Vec3::Zero());
  r.finish();
  return p;
}

PlaneParams plane_from(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) config_error(path, "expected [a, b, c, d]");
  Vec4 v;
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_number()) config_error(path + "/" + std::to_string(i), "expected a number");
    v[i] = j[i].get<double>();
  }
  return PlaneParams::from_vector(v);
}

CheckerboardSpec checkerboard_from(ObjectReader r) {
  CheckerboardSpec s;
  s.inner_cols = r.integer("inner_cols", s.inner_cols);
  s.inner_rows = r.integer("inner_rows", s.inner_rows);
  s.square_size = r.number("square_size", s.square_size);
  s.sheet_w = r.number("sheet_w", s.sheet_w);
  s.sheet_h = r.number("sheet_h", s.sheet_h);
  s.saturation = r.number("saturation", s.saturation);
  r.finish();
  try {
    s.validate();
  } catch (const Error& e) {
    config_error(r.path(), e.what());
  }
  return s;
}

}  // namespace vlscan::app
