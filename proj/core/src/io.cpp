#include "vlscan/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vlscan/error.hpp"

namespace vlscan {

namespace {

[[noreturn]] void io_fail(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kIoError, path.string() + ": " + what);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode);
  if (!f) io_fail(path, "cannot open for writing");
  return f;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream f(path, mode);
  if (!f) io_fail(path, "cannot open for reading");
  return f;
}

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const Image& img) {
  if (img.channels() != 1 && img.channels() != 3) io_fail(path, "PFM needs 1 or 3 channels");
  auto f = open_out(path, std::ios::binary);
  const std::string header = std::string(img.channels() == 3 ? "PF" : "Pf") + "\n" +
                             std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n-1.0\n";
  f.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::vector<std::uint32_t> row(static_cast<std::size_t>(img.width()) * img.channels());
  for (int y = img.height() - 1; y >= 0; --y) {
    const auto src = img.row(y);
    for (std::size_t i = 0; i < src.size(); ++i) {
      row[i] = to_little_endian(std::bit_cast<std::uint32_t>(static_cast<float>(src[i])));
    }
    f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
  }
  if (!f) io_fail(path, "write failed");
}

Image read_pfm(const std::filesystem::path& path) {
  auto f = open_in(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  f >> magic >> w >> h >> scale;
  f.get();
  if (!f || (magic != "PF" && magic != "Pf") || w <= 0 || h <= 0 || scale == 0.0) io_fail(path, "bad PFM header");
  const int channels = magic == "PF" ? 3 : 1;
  const bool little = scale < 0.0;
  Image img(w, h, channels);
  std::vector<std::uint32_t> row(static_cast<std::size_t>(w) * channels);
  for (int y = h - 1; y >= 0; --y) {
    f.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
    if (!f) io_fail(path, "truncated PFM data");
    auto dst = img.row(y);
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::uint32_t v = row[i];
      if ((std::endian::native == std::endian::little) != little) {
        v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
      }
      dst[i] = std::bit_cast<float>(v);
    }
  }
  return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  if (img.channels() != 1 && img.channels() != 3) io_fail(path, "PNG needs 1 or 3 channels");
  std::vector<std::uint8_t> pixels(img.data().size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    double v = img.data()[i];
    v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::pow(v, 1.0 / 2.2)));
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    io_fail(path, "PNG write failed: " + msg);
  }
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  auto f = open_out(path);
  f << "ply\nformat ascii 1.0\nelement vertex " << cloud.valid_count()
    << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  char buf[96];
  for (const CloudPoint& p : cloud.points) {
    if (!p.valid()) continue;
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.p.x(), p.p.y(), p.p.z());
    f << buf;
  }
  if (!f) io_fail(path, "write failed");
}

std::vector<Vec3> read_ply(const std::filesystem::path& path) {
  auto f = open_in(path);
  std::string line;
  std::size_t count = 0;
  bool header_ok = false;
  std::getline(f, line);
  if (line != "ply") io_fail(path, "not a PLY file");
  while (std::getline(f, line)) {
    if (line.rfind("format", 0) == 0 && line != "format ascii 1.0") io_fail(path, "only ASCII PLY is supported");
    if (line.rfind("element vertex", 0) == 0) count = std::stoul(line.substr(15));
    if (line == "end_header") {
      header_ok = true;
      break;
    }
  }
  if (!header_ok) io_fail(path, "missing end_header");
  std::vector<Vec3> pts(count);
  for (auto& p : pts) {
    if (!(f >> p.x() >> p.y() >> p.z())) io_fail(path, "truncated vertex list");
  }
  return pts;
}

TriMesh read_off(const std::filesystem::path& path) {
  auto f = open_in(path);
  std::stringstream clean;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    clean << line << '\n';
  }
  std::string magic;
  clean >> magic;
  if (magic != "OFF") io_fail(path, "missing OFF header");
  int nv = 0, nf = 0, ne = 0;
  if (!(clean >> nv >> nf >> ne) || nv < 0 || nf < 0) io_fail(path, "bad OFF counts");
  TriMesh mesh;
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices) {
    if (!(clean >> v.x() >> v.y() >> v.z())) io_fail(path, "truncated vertex list");
  }
  for (int i = 0; i < nf; ++i) {
    int k = 0;
    if (!(clean >> k) || k < 3) io_fail(path, "bad face");
    std::vector<int> idx(k);
    for (int& v : idx) {
      if (!(clean >> v) || v < 0 || v >= nv) io_fail(path, "bad face index");
    }
    std::string rest;
    std::getline(clean, rest);
    for (int j = 1; j + 1 < k; ++j) mesh.triangles.push_back({idx[0], idx[j], idx[j + 1]});
  }
  try {
    mesh.finalize();
  } catch (const Error& e) {
    io_fail(path, e.what());
  }
  return mesh;
}

void write_profile_csv(const std::filesystem::path& path, const LaserProfile& profile) {
  auto f = open_out(path);
  f << "row,col,amplitude,sigma,valid,reason\n";
  char buf[160];
  for (const ProfileRow& r : profile.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%d,%s\n", r.row, r.col, r.amplitude, r.sigma,
                  r.valid() ? 1 : 0, std::string(to_string(r.status)).c_str());
    f << buf;
  }
  if (!f) io_fail(path, "write failed");
}

LaserProfile read_profile_csv(const std::filesystem::path& path, int width, int height) {
  auto f = open_in(path);
  std::string line;
  std::getline(f, line);
  if (line.rfind("row,col,amplitude,sigma,valid,reason", 0) != 0) io_fail(path, "unexpected profile header");
  LaserProfile profile;
  profile.width = width;
  profile.height = height;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell[6];
    for (auto& c : cell) std::getline(ss, c, ',');
    ProfileRow r;
    try {
      r.row = std::stoi(cell[0]);
      r.col = std::stod(cell[1]);
      r.amplitude = std::stod(cell[2]);
      r.sigma = std::stod(cell[3]);
    } catch (const std::exception&) {
      io_fail(path, "bad profile line: " + line);
    }
    const std::string& reason = cell[5];
    if (reason == "valid") r.status = RowStatus::kValid;
    else if (reason == "fit_failed") r.status = RowStatus::kFitFailed;
    else if (reason == "thin_mask") r.status = RowStatus::kThinMask;
    else r.status = RowStatus::kNoLaser;
    profile.rows.push_back(r);
  }
  return profile;
}

std::string read_text(const std::filesystem::path& path) {
  auto f = open_in(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) io_fail(path, "write failed");
}

}  // namespace vlscan
