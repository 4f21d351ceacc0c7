#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "sparsedc/raster.hpp"

namespace sparsedc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Pinhole intrinsics in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws InvalidInput unless fx, fy > 0, 0 < cx < width, 0 < cy < height.
  void validate() const;

  /// Scalar focal length for the canonical depth transform: (fx + fy) / 2.
  double focal() const { return 0.5 * (fx + fy); }

  bool operator==(const CameraIntrinsics&) const = default;
};

enum class FrameTag { CamFromWorld, WorldFromCam };

std::string_view to_string(FrameTag tag);
FrameTag frame_tag_from_string(std::string_view s);

/// Rigid transform whose direction is always explicit.
class Pose {
 public:
  Pose() = default;
  /// Throws InvalidInput if rotation is not a proper rotation within 1e-6.
  Pose(const Mat3& rotation, const Vec3& translation, FrameTag tag);

  static Pose identity(FrameTag tag = FrameTag::WorldFromCam) {
    return Pose(Mat3::Identity(), Vec3::Zero(), tag);
  }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  FrameTag tag() const { return tag_; }

  Pose inverse() const;
  Pose as_cam_from_world() const;
  Pose as_world_from_cam() const;

  /// Applies the stored transform as-is (direction given by tag()).
  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }

  Vec3 world_to_camera(const Vec3& p_world) const;
  Vec3 camera_to_world(const Vec3& p_cam) const;
  /// Camera center in world coordinates.
  Vec3 center() const { return as_world_from_cam().translation(); }

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
  FrameTag tag_ = FrameTag::WorldFromCam;
};

/// True when r is orthonormal with determinant +1 within tol.
bool is_rotation(const Mat3& r, double tol = 1e-6);

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double z = 0.0;
};

/// u = fx x/z + cx, v = fy y/z + cy. nullopt when z <= 0 or outside [0,w) x [0,h).
std::optional<Projection> project(const CameraIntrinsics& intr, const Vec3& p_cam);

/// Inverse of project for a given z-depth.
Vec3 unproject(const CameraIntrinsics& intr, double u, double v, double z);

struct PointCloud {
  std::vector<Vec3> points;
};

/// Projects a world-frame cloud into the image and z-buffers (nearest wins).
/// A point lands in pixel (floor(u), floor(v)).
DepthMap reproject_cloud(const CameraIntrinsics& intr, const Pose& pose, const PointCloud& cloud);

/// Back-projects every valid pixel center of `depth` into a world-frame cloud.
PointCloud unproject_depth(const CameraIntrinsics& intr, const Pose& pose, const DepthMap& depth);

/// Canonical focal length and supported depth range of the sparse encoding.
struct TransformConfig {
  double f_c = 900.0;
  double d_min = 0.5;
  double d_max = 80.0;

  void validate() const;
};

/// (f_c / f) * d. Throws InvalidInput for d <= 0 or f <= 0.
double canonical_depth(double depth, double focal, const TransformConfig& cfg);

struct EncodedDepth {
  double value = 0.0;    ///< normalized inverse canonical depth in (0, 1]
  bool clamped = false;  ///< canonical depth was below d_min
};

/// d_min / canonical_depth(d), clamped to 1 when the canonical depth is below d_min.
EncodedDepth encode_sparse_value(double depth, double focal, const TransformConfig& cfg);

/// d_min * f / (f_c * d_sci). Throws InvalidInput for d_sci <= 0 or d_sci > 1.
double decode_sparse_value(double encoded, double focal, const TransformConfig& cfg);

}  // namespace sparsedc
