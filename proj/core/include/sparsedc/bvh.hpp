#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sparsedc/mesh.hpp"

namespace sparsedc {

/// Minimum accepted ray parameter; suppresses self-intersection at meter scale.
inline constexpr double kRayEpsilon = 1e-6;
/// Two hits closer than this are a tie and resolve to the lower triangle index.
inline constexpr double kHitTieTolerance = 1e-9;

struct Hit {
  double t = 0.0;
  std::uint32_t triangle = 0;
};

/// True when hit a should replace hit b as the nearest.
inline bool nearer(const Hit& a, const Hit& b) {
  if (a.t < b.t - kHitTieTolerance) return true;
  if (a.t > b.t + kHitTieTolerance) return false;
  return a.triangle < b.triangle;
}

/// Moller-Trumbore with inclusive edges. Returns t when t > kRayEpsilon.
std::optional<double> intersect_triangle(const TriangleMesh& mesh, std::uint32_t tri, const Vec3& origin,
                                         const Vec3& direction);

struct BvhNode {
  Aabb box;
  std::uint32_t first = 0;  ///< leaf: offset into order(); internal: index of left child (right = first + 1)
  std::uint32_t count = 0;  ///< leaf: number of triangles; 0 marks an internal node
  bool is_leaf() const { return count > 0; }
};

/// Median-split bounding volume hierarchy over triangle centroids.
class Bvh {
 public:
  static constexpr std::uint32_t kMaxLeafSize = 4;

  const std::vector<BvhNode>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& order() const { return order_; }
  const BvhNode& root() const { return nodes_.front(); }

  /// Verifies the containment and exactly-once-per-leaf properties.
  bool check_invariants(const TriangleMesh& mesh) const;

 private:
  friend Bvh build_bvh(const TriangleMesh& mesh);
  std::vector<BvhNode> nodes_;
  std::vector<std::uint32_t> order_;
};

Bvh build_bvh(const TriangleMesh& mesh);

/// Nearest hit along a unit-length ray. Throws InvalidInput when
/// | |direction| - 1 | > 1e-9.
std::optional<Hit> ray_cast(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& origin, const Vec3& direction);

}  // namespace sparsedc
