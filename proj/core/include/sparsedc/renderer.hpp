#pragma once

#include <cstdint>

#include "sparsedc/bvh.hpp"
#include "sparsedc/camera.hpp"
#include "sparsedc/io.hpp"

namespace sparsedc {

struct CameraRay {
  Vec3 origin;
  Vec3 direction;      ///< unit length, world frame
  double depth_scale;  ///< z-depth = t * depth_scale
};

/// Primary ray through the center of pixel (x, y).
CameraRay camera_ray(const CameraIntrinsics& intr, const Pose& pose, int x, int y);

struct RenderResult {
  DepthMap depth;
  Grid<std::int32_t> triangle;  ///< hit triangle per pixel, -1 on a miss
};

/// One ray per pixel; rows are distributed over `threads` workers (0 = all cores).
RenderResult render(const Bvh& bvh, const TriangleMesh& mesh, const CameraIntrinsics& intr, const Pose& pose,
                    unsigned threads = 1);

/// z-depth along the optical axis; misses stay invalid.
DepthMap render_depth(const Bvh& bvh, const TriangleMesh& mesh, const CameraIntrinsics& intr, const Pose& pose,
                      unsigned threads = 1);

struct ShadingParams {
  Vec3 light_direction{0.3, 0.2, 1.0};  ///< direction towards the light, world frame
  double ambient = 0.15;
  double albedo = 0.85;
};

/// Flat Lambertian grayscale proxy: ambient + albedo * max(0, n . l) per hit
/// facet, with the normal flipped to face the camera. Misses are black.
GrayImage shade_lambertian(const TriangleMesh& mesh, const RenderResult& render, const Pose& pose,
                           const CameraIntrinsics& intr, const ShadingParams& params = {});

}  // namespace sparsedc
