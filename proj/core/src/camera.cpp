#include "sparsedc/camera.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "sparsedc/error.hpp"

namespace sparsedc {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidInput("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidInput("intrinsics: image size must be positive");
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
    throw InvalidInput("intrinsics: principal point must lie inside the image");
  }
}

std::string_view to_string(FrameTag tag) {
  return tag == FrameTag::CamFromWorld ? "cam_from_world" : "world_from_cam";
}

FrameTag frame_tag_from_string(std::string_view s) {
  if (s == "cam_from_world") return FrameTag::CamFromWorld;
  if (s == "world_from_cam") return FrameTag::WorldFromCam;
  throw InvalidInput("unknown frame_tag '" + std::string(s) + "'");
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  if (((r.transpose() * r) - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

Pose::Pose(const Mat3& rotation, const Vec3& translation, FrameTag tag)
    : rotation_(rotation), translation_(translation), tag_(tag) {
  if (!is_rotation(rotation)) throw InvalidInput("pose: rotation is not orthonormal with det +1");
  if (!translation.allFinite()) throw InvalidInput("pose: translation is not finite");
}

Pose Pose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  Pose out;
  out.rotation_ = rt;
  out.translation_ = -(rt * translation_);
  out.tag_ = tag_ == FrameTag::CamFromWorld ? FrameTag::WorldFromCam : FrameTag::CamFromWorld;
  return out;
}

Pose Pose::as_cam_from_world() const {
  return tag_ == FrameTag::CamFromWorld ? *this : inverse();
}

Pose Pose::as_world_from_cam() const {
  return tag_ == FrameTag::WorldFromCam ? *this : inverse();
}

Vec3 Pose::world_to_camera(const Vec3& p_world) const {
  if (tag_ == FrameTag::CamFromWorld) return rotation_ * p_world + translation_;
  return rotation_.transpose() * (p_world - translation_);
}

Vec3 Pose::camera_to_world(const Vec3& p_cam) const {
  if (tag_ == FrameTag::WorldFromCam) return rotation_ * p_cam + translation_;
  return rotation_.transpose() * (p_cam - translation_);
}

std::optional<Projection> project(const CameraIntrinsics& intr, const Vec3& p_cam) {
  const double z = p_cam.z();
  if (!(z > 0.0)) return std::nullopt;
  const double u = intr.fx * p_cam.x() / z + intr.cx;
  const double v = intr.fy * p_cam.y() / z + intr.cy;
  if (!(u >= 0.0 && u < intr.width && v >= 0.0 && v < intr.height)) return std::nullopt;
  return Projection{u, v, z};
}

Vec3 unproject(const CameraIntrinsics& intr, double u, double v, double z) {
  return {(u - intr.cx) * z / intr.fx, (v - intr.cy) * z / intr.fy, z};
}

DepthMap reproject_cloud(const CameraIntrinsics& intr, const Pose& pose, const PointCloud& cloud) {
  intr.validate();
  const Pose cam_from_world = pose.as_cam_from_world();
  Grid<double> nearest(intr.width, intr.height, std::numeric_limits<double>::infinity());
  for (const Vec3& p : cloud.points) {
    const auto proj = project(intr, cam_from_world.apply(p));
    if (!proj) continue;
    const int x = static_cast<int>(std::floor(proj->u));
    const int y = static_cast<int>(std::floor(proj->v));
    double& cell = nearest(x, y);
    if (proj->z < cell) cell = proj->z;
  }
  DepthMap out(intr.width, intr.height);
  for (int y = 0; y < intr.height; ++y) {
    for (int x = 0; x < intr.width; ++x) {
      if (std::isfinite(nearest(x, y))) out.set(x, y, static_cast<float>(nearest(x, y)));
    }
  }
  return out;
}

PointCloud unproject_depth(const CameraIntrinsics& intr, const Pose& pose, const DepthMap& depth) {
  const Pose world_from_cam = pose.as_world_from_cam();
  PointCloud cloud;
  cloud.points.reserve(depth.valid_count());
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!depth.valid(x, y)) continue;
      const Vec3 p_cam = unproject(intr, x + 0.5, y + 0.5, depth.at(x, y));
      cloud.points.push_back(world_from_cam.apply(p_cam));
    }
  }
  return cloud;
}

void TransformConfig::validate() const {
  if (!(f_c > 0.0)) throw InvalidInput("transform: f_c must be positive");
  if (!(d_min > 0.0 && d_min < d_max)) throw InvalidInput("transform: require 0 < d_min < d_max");
}

double canonical_depth(double depth, double focal, const TransformConfig& cfg) {
  if (!(depth > 0.0)) throw InvalidInput("canonical_depth: depth must be positive");
  if (!(focal > 0.0)) throw InvalidInput("canonical_depth: focal length must be positive");
  return (cfg.f_c / focal) * depth;
}

EncodedDepth encode_sparse_value(double depth, double focal, const TransformConfig& cfg) {
  const double canonical = canonical_depth(depth, focal, cfg);
  if (canonical < cfg.d_min) return {1.0, true};
  return {cfg.d_min / canonical, false};
}

double decode_sparse_value(double encoded, double focal, const TransformConfig& cfg) {
  if (!(encoded > 0.0) || encoded > 1.0) {
    throw InvalidInput("decode_sparse_value: encoded value must lie in (0, 1]");
  }
  if (!(focal > 0.0)) throw InvalidInput("decode_sparse_value: focal length must be positive");
  return cfg.d_min * focal / (cfg.f_c * encoded);
}

}  // namespace sparsedc
