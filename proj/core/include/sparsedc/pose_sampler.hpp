#pragma once

#include <cstdint>

#include "sparsedc/bvh.hpp"
#include "sparsedc/camera.hpp"
#include "sparsedc/rng.hpp"

namespace sparsedc {

/// Terrain-relative random camera placement. Defaults are the generation
/// parameters of the synthetic training sets.
struct PoseSamplerConfig {
  std::uint64_t n_frames = 10000;
  double z_min = 1.0;          ///< meters above the surface
  double z_max = 51.0;
  double theta_xy_deg = 22.5;  ///< max tilt about each camera axis
  std::uint64_t seed = 0;
  double horizontal_margin = 0.05;  ///< fraction of the mesh extent excluded at each border

  void validate() const;
};

/// Number of consecutive misses after which sample_pose gives up.
inline constexpr int kMaxPoseRejections = 1000;

struct NadirAngles {
  double tilt_x = 0.0;  ///< radians
  double tilt_y = 0.0;
  double yaw = 0.0;
};

/// world_from_cam rotation: yaw about world +z, applied to a nadir camera
/// (optical axis along world -z) that was first tilted about its own x then y axis.
Mat3 nadir_rotation(const NadirAngles& angles);

/// Inverse of nadir_rotation for |tilt_x|, |tilt_y| < 90 deg; yaw in [0, 2 pi).
NadirAngles decompose_nadir_rotation(const Mat3& world_from_cam);

struct PoseSample {
  Pose pose;  ///< world_from_cam
  NadirAngles angles;
  double surface_z = 0.0;
  double height_above_surface = 0.0;
  int rejections = 0;
};

/// Draws one pose. Throws Error after kMaxPoseRejections consecutive
/// horizontal positions without surface underneath.
PoseSample sample_pose(const PoseSamplerConfig& cfg, const Bvh& bvh, const TriangleMesh& mesh, Rng& rng);

/// Height of the first surface hit when looking straight down at (x, y).
std::optional<double> surface_height(const Bvh& bvh, const TriangleMesh& mesh, double x, double y);

}  // namespace sparsedc
