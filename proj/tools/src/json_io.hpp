#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "vlscan/calib.hpp"
#include "vlscan/extract.hpp"
#include "vlscan/laser.hpp"
#include "vlscan/recon.hpp"
#include "vlscan/scene.hpp"

namespace vlscan::app {

using Json = nlohmann::ordered_json;

Json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const Json& j);

// Typed access to a JSON object that remembers which keys were read; finish()
// rejects every key that was not, reporting its JSON path. "notes" is always
// accepted.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);
  std::string path_of(const std::string& key) const { return path_ + "/" + key; }
  const std::string& path() const { return path_; }

  double number(const std::string& key, double fallback);
  double number(const std::string& key);
  int integer(const std::string& key, int fallback);
  std::uint64_t uint64(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key, const std::string& fallback);
  Vec3 vec3(const std::string& key, const Vec3& fallback);
  Vec3 vec3(const std::string& key);
  ObjectReader object(const std::string& key);

  void finish() const;

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

[[noreturn]] void config_error(const std::string& path, const std::string& what);

Vec3 vec3_from(const Json& j, const std::string& path);
Mat3 mat3_from(const Json& j, const std::string& path);
Mat4 mat4_from(const Json& j, const std::string& path);

Json to_json(const Vec3& v);
Json to_json(const Mat3& m);
Json to_json(const Mat4& m);
Json to_json(const Intrinsics& K);
Json to_json(const Distortion& d);
Json to_json(const Pose& p);
Json to_json(const PlaneParams& p);
Json to_json(const LaserModel& l);
Json to_json(const CheckerboardSpec& s);
Json to_json(const LMReport& r);
Json to_json(const LaserProfile& p);
Json to_json(const EvalReport& r, bool with_entries);

Intrinsics intrinsics_from(ObjectReader r);
Distortion distortion_from(ObjectReader r);
// {"R": 3x3 | "axis_angle": [3], "t": [3]}
Pose pose_from(ObjectReader r);
PlaneParams plane_from(const Json& j, const std::string& path);
CheckerboardSpec checkerboard_from(ObjectReader r);

}  // namespace vlscan::app
