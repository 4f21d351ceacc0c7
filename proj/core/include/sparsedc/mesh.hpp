#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "sparsedc/camera.hpp"

namespace sparsedc {

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool contains(const Aabb& b) const {
    return (b.lo.array() >= lo.array()).all() && (b.hi.array() <= hi.array()).all();
  }
  Vec3 extent() const { return hi - lo; }
  bool operator==(const Aabb& o) const { return lo == o.lo && hi == o.hi; }
};

using Triangle = std::array<std::uint32_t, 3>;

/// Triangle soup with validated indices and no degenerate faces.
class TriangleMesh {
 public:
  /// Throws InvalidInput on an empty mesh, out-of-range index or a triangle
  /// with area <= 1e-12 m^2.
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Aabb& bounds() const { return bounds_; }
  std::size_t triangle_count() const { return triangles_.size(); }

  const Vec3& corner(std::size_t tri, int k) const { return vertices_[triangles_[tri][static_cast<std::size_t>(k)]]; }
  Aabb triangle_bounds(std::size_t tri) const;
  Vec3 centroid(std::size_t tri) const;
  /// Unit normal following the counter-clockwise winding.
  Vec3 normal(std::size_t tri) const;
  double area(std::size_t tri) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  Aabb bounds_;
};

/// Wavefront OBJ subset: `v` and `f` records (fan-triangulated), `#` comments.
/// Normals, texture coordinates, groups and materials are skipped.
TriangleMesh load_obj(const std::filesystem::path& path);
TriangleMesh parse_obj(std::istream& in, const std::string& source = "<obj>");
void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Procedural height-field terrain over [0, extent]^2 with (cells+1)^2 vertices.
/// Heights are a deterministic sum of sinusoids plus seeded jitter, so flat
/// shading gives every facet a slightly different brightness.
TriangleMesh make_terrain_mesh(int cells, double extent, double amplitude, std::uint64_t seed);

/// Two-triangle horizontal quad at height z covering [x0,x1] x [y0,y1].
TriangleMesh make_ground_quad(double x0, double y0, double x1, double y1, double z = 0.0);

}  // namespace sparsedc
