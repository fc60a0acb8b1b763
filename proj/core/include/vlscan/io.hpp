#pragma once

#include <filesystem>
#include <string>

#include "vlscan/extract.hpp"
#include "vlscan/image.hpp"
#include "vlscan/recon.hpp"
#include "vlscan/scene.hpp"

namespace vlscan {

// Portable float map, little-endian, rows stored bottom to top. Three-channel
// images use "PF", single-channel images "Pf". Throws IoError.
void write_pfm(const std::filesystem::path& path, const Image& img);
Image read_pfm(const std::filesystem::path& path);

// 8-bit preview: values clamped to [0, 1] and gamma encoded with 1/2.2.
void write_png(const std::filesystem::path& path, const Image& img);

// ASCII PLY with x y z as doubles printed to 9 significant digits. Only valid
// points are written.
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);
std::vector<Vec3> read_ply(const std::filesystem::path& path);

// Object File Format; polygons are fan-triangulated.
TriMesh read_off(const std::filesystem::path& path);

// Columns row, col, amplitude, sigma, valid, reason.
void write_profile_csv(const std::filesystem::path& path, const LaserProfile& profile);
LaserProfile read_profile_csv(const std::filesystem::path& path, int width, int height);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace vlscan
