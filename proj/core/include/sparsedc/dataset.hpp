#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sparsedc/camera.hpp"
#include "sparsedc/mesh.hpp"
#include "sparsedc/pose_sampler.hpp"

namespace sparsedc {

struct FrameFiles {
  std::string depth;  ///< PFM, relative to the dataset directory
  std::string pose;   ///< camera JSON
  std::string image;  ///< 8-bit PGM shading proxy
};

struct DatasetManifest {
  std::string scene;
  std::uint64_t seed = 0;
  std::uint64_t n_frames = 0;
  CameraIntrinsics intrinsics;
  PoseSamplerConfig config;
  std::vector<FrameFiles> frames;

  std::string to_json() const;
  static DatasetManifest from_json(const std::string& text, const std::string& source = "<manifest>");
};

inline constexpr const char* kManifestName = "manifest.json";

/// Renders cfg.n_frames depth/pose/image triples into out_dir and writes
/// manifest.json. Frame i draws from derive_seed(cfg.seed, PoseSampling, i),
/// so the output depends only on (mesh, cfg, intrinsics) and not on `threads`.
DatasetManifest generate_dataset(const TriangleMesh& mesh, const std::string& scene, const PoseSamplerConfig& cfg,
                                 const CameraIntrinsics& intr, const std::filesystem::path& out_dir,
                                 unsigned threads = 1);

DatasetManifest generate_dataset(const std::filesystem::path& mesh_path, const PoseSamplerConfig& cfg,
                                 const CameraIntrinsics& intr, const std::filesystem::path& out_dir,
                                 unsigned threads = 1);

}  // namespace sparsedc
