#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "sparsedc/camera.hpp"
#include "sparsedc/raster.hpp"

namespace sparsedc {

// PFM grayscale ("Pf"): header "Pf\n<w> <h>\n-1.0\n", little-endian float32,
// bottom row first. Big-endian files (positive scale) are read as well.
void write_pfm(const std::filesystem::path& path, const Grid<float>& raster);
Grid<float> read_pfm(const std::filesystem::path& path);
void write_pfm(std::ostream& out, const Grid<float>& raster);
Grid<float> read_pfm(std::istream& in, const std::string& source = "<stream>");

inline void write_depth(const std::filesystem::path& path, const DepthMap& depth) {
  write_pfm(path, depth.raster());
}
inline DepthMap read_depth(const std::filesystem::path& path) { return DepthMap(read_pfm(path)); }

/// 8-bit binary PGM (P5).
using GrayImage = Grid<std::uint8_t>;
void write_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_pgm(const std::filesystem::path& path);

/// Intrinsics plus pose, serialized as one flat JSON object.
struct CameraFile {
  CameraIntrinsics intrinsics;
  Pose pose;
};

std::string camera_to_json(const CameraFile& camera);
CameraFile camera_from_json(const std::string& text, const std::string& source = "<json>");
void write_camera(const std::filesystem::path& path, const CameraFile& camera);
CameraFile read_camera(const std::filesystem::path& path);

/// CSV with header "x,y,z".
void write_cloud_csv(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_cloud_csv(const std::filesystem::path& path);

/// Whole-file helpers that throw IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sparsedc
