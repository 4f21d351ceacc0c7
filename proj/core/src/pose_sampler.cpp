#include "sparsedc/pose_sampler.hpp"

#include <cmath>
#include <numbers>

#include "sparsedc/error.hpp"

namespace sparsedc {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Mat3 rot_x(double a) {
  Mat3 r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}

Mat3 rot_y(double a) {
  Mat3 r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}

Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

// Camera x -> world x, camera y -> world -y, optical axis -> world -z.
Mat3 nadir_base() {
  Mat3 r;
  r << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  return r;
}

}  // namespace

void PoseSamplerConfig::validate() const {
  if (!(z_min > 0.0 && z_min < z_max)) throw InvalidInput("pose sampler: require 0 < z_min < z_max");
  if (!(theta_xy_deg >= 0.0 && theta_xy_deg < 90.0)) throw InvalidInput("pose sampler: require 0 <= theta_xy < 90");
  if (!(horizontal_margin >= 0.0 && horizontal_margin < 0.5)) {
    throw InvalidInput("pose sampler: horizontal_margin must lie in [0, 0.5)");
  }
}

Mat3 nadir_rotation(const NadirAngles& angles) {
  return rot_z(angles.yaw) * nadir_base() * rot_x(angles.tilt_x) * rot_y(angles.tilt_y);
}

NadirAngles decompose_nadir_rotation(const Mat3& r) {
  // Third row of R = Rz * B * Rx(a) * Ry(b) is (cos a sin b, -sin a, -cos a cos b).
  NadirAngles out;
  out.tilt_x = -std::asin(std::clamp(r(2, 1), -1.0, 1.0));
  out.tilt_y = std::atan2(r(2, 0), -r(2, 2));
  // First column before yaw is (cos b, -sin a sin b, cos a sin b).
  const double before = std::atan2(-std::sin(out.tilt_x) * std::sin(out.tilt_y), std::cos(out.tilt_y));
  double yaw = std::atan2(r(1, 0), r(0, 0)) - before;
  yaw = std::fmod(yaw, 2.0 * std::numbers::pi);
  if (yaw < 0.0) yaw += 2.0 * std::numbers::pi;
  out.yaw = yaw;
  return out;
}

std::optional<double> surface_height(const Bvh& bvh, const TriangleMesh& mesh, double x, double y) {
  const double top = mesh.bounds().hi.z() + 1.0;
  const auto hit = ray_cast(bvh, mesh, Vec3(x, y, top), Vec3(0.0, 0.0, -1.0));
  if (!hit) return std::nullopt;
  return top - hit->t;
}

PoseSample sample_pose(const PoseSamplerConfig& cfg, const Bvh& bvh, const TriangleMesh& mesh, Rng& rng) {
  cfg.validate();
  const Aabb& b = mesh.bounds();
  const Vec3 extent = b.extent();
  const double x0 = b.lo.x() + cfg.horizontal_margin * extent.x();
  const double x1 = b.hi.x() - cfg.horizontal_margin * extent.x();
  const double y0 = b.lo.y() + cfg.horizontal_margin * extent.y();
  const double y1 = b.hi.y() - cfg.horizontal_margin * extent.y();

  PoseSample sample;
  for (int attempt = 0; attempt < kMaxPoseRejections; ++attempt) {
    const double x = rng.uniform(x0, x1);
    const double y = rng.uniform(y0, y1);
    const auto ground = surface_height(bvh, mesh, x, y);
    if (!ground) {
      ++sample.rejections;
      continue;
    }
    const double height = rng.uniform(cfg.z_min, cfg.z_max);
    const double theta = cfg.theta_xy_deg * kDegToRad;
    sample.angles.tilt_x = rng.uniform(-theta, theta);
    sample.angles.tilt_y = rng.uniform(-theta, theta);
    sample.angles.yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
    sample.surface_z = *ground;
    sample.height_above_surface = height;
    sample.pose = Pose(nadir_rotation(sample.angles), Vec3(x, y, *ground + height), FrameTag::WorldFromCam);
    return sample;
  }
  throw Error("sample_pose: " + std::to_string(kMaxPoseRejections) +
              " consecutive positions without surface below; mesh has no floor under the sampled region");
}

}  // namespace sparsedc
