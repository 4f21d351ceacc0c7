#include "sparsedc/renderer.hpp"

#include <algorithm>
#include <cmath>

#include "sparsedc/parallel.hpp"

namespace sparsedc {

CameraRay camera_ray(const CameraIntrinsics& intr, const Pose& pose, int x, int y) {
  const Pose world_from_cam = pose.as_world_from_cam();
  const Vec3 d_cam((x + 0.5 - intr.cx) / intr.fx, (y + 0.5 - intr.cy) / intr.fy, 1.0);
  const double norm = d_cam.norm();
  return {world_from_cam.translation(), world_from_cam.rotation() * (d_cam / norm), 1.0 / norm};
}

RenderResult render(const Bvh& bvh, const TriangleMesh& mesh, const CameraIntrinsics& intr, const Pose& pose,
                    unsigned threads) {
  intr.validate();
  RenderResult out{DepthMap(intr.width, intr.height), Grid<std::int32_t>(intr.width, intr.height, -1)};
  Grid<float> depth(intr.width, intr.height, 0.0f);
  parallel_for(static_cast<std::size_t>(intr.height), threads, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < intr.width; ++x) {
      const CameraRay ray = camera_ray(intr, pose, x, y);
      const auto hit = ray_cast(bvh, mesh, ray.origin, ray.direction);
      if (!hit) continue;
      depth(x, y) = static_cast<float>(hit->t * ray.depth_scale);
      out.triangle(x, y) = static_cast<std::int32_t>(hit->triangle);
    }
  });
  out.depth = DepthMap(std::move(depth));
  return out;
}

DepthMap render_depth(const Bvh& bvh, const TriangleMesh& mesh, const CameraIntrinsics& intr, const Pose& pose,
                      unsigned threads) {
  return render(bvh, mesh, intr, pose, threads).depth;
}

GrayImage shade_lambertian(const TriangleMesh& mesh, const RenderResult& render, const Pose& pose,
                           const CameraIntrinsics& intr, const ShadingParams& params) {
  const Vec3 light = params.light_direction.normalized();
  GrayImage image(render.triangle.width(), render.triangle.height(), 0);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const std::int32_t tri = render.triangle(x, y);
      if (tri < 0) continue;
      Vec3 n = mesh.normal(static_cast<std::size_t>(tri));
      if (n.dot(camera_ray(intr, pose, x, y).direction) > 0.0) n = -n;
      const double intensity = params.ambient + params.albedo * std::max(0.0, n.dot(light));
      image(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(intensity, 0.0, 1.0) * 255.0));
    }
  }
  return image;
}

}  // namespace sparsedc
