#include "sparsedc/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparsedc/error.hpp"

namespace sparsedc {

std::optional<double> intersect_triangle(const TriangleMesh& mesh, std::uint32_t tri, const Vec3& origin,
                                         const Vec3& direction) {
  const Vec3& v0 = mesh.corner(tri, 0);
  const Vec3 e1 = mesh.corner(tri, 1) - v0;
  const Vec3 e2 = mesh.corner(tri, 2) - v0;
  const Vec3 p = direction.cross(e2);
  const double det = e1.dot(p);
  if (det == 0.0) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = origin - v0;
  const double u = s.dot(p) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = direction.dot(q) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv_det;
  if (!(t > kRayEpsilon)) return std::nullopt;
  return t;
}

namespace {

struct BuildItem {
  std::uint32_t node;
  std::uint32_t begin;
  std::uint32_t end;
};

// Conservative slab test; the exit distance is widened by a few ulps so that
// hits on box faces are never culled by rounding.
bool slab_entry(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, const Vec3& direction, double t_max,
                double& t_entry) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    if (direction[a] == 0.0) {
      if (origin[a] < box.lo[a] || origin[a] > box.hi[a]) return false;
      continue;
    }
    double near = (box.lo[a] - origin[a]) * inv_dir[a];
    double far = (box.hi[a] - origin[a]) * inv_dir[a];
    if (near > far) std::swap(near, far);
    far *= 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) return false;
  }
  t_entry = t0;
  return true;
}

}  // namespace

Bvh build_bvh(const TriangleMesh& mesh) {
  const auto n = static_cast<std::uint32_t>(mesh.triangle_count());
  Bvh bvh;
  bvh.order_.resize(n);
  std::iota(bvh.order_.begin(), bvh.order_.end(), 0u);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t i = 0; i < n; ++i) centroids[i] = mesh.centroid(i);

  bvh.nodes_.reserve(2 * static_cast<std::size_t>(n));
  bvh.nodes_.push_back({});
  std::vector<BuildItem> work{{0, 0, n}};
  while (!work.empty()) {
    const BuildItem item = work.back();
    work.pop_back();
    Aabb box;
    Aabb centroid_box;
    for (std::uint32_t i = item.begin; i < item.end; ++i) {
      box.extend(mesh.triangle_bounds(bvh.order_[i]));
      centroid_box.extend(centroids[bvh.order_[i]]);
    }
    bvh.nodes_[item.node].box = box;
    const std::uint32_t count = item.end - item.begin;
    if (count <= Bvh::kMaxLeafSize) {
      bvh.nodes_[item.node].first = item.begin;
      bvh.nodes_[item.node].count = count;
      continue;
    }
    int axis = 0;
    centroid_box.extent().maxCoeff(&axis);
    const std::uint32_t mid = item.begin + count / 2;
    // Ties on the split coordinate are broken by triangle index so the tree is
    // independent of the nth_element implementation.
    std::nth_element(bvh.order_.begin() + item.begin, bvh.order_.begin() + mid, bvh.order_.begin() + item.end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double ca = centroids[a][axis];
                       const double cb = centroids[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    const auto left = static_cast<std::uint32_t>(bvh.nodes_.size());
    bvh.nodes_.push_back({});
    bvh.nodes_.push_back({});
    bvh.nodes_[item.node].first = left;
    bvh.nodes_[item.node].count = 0;
    work.push_back({left + 1, mid, item.end});
    work.push_back({left, item.begin, mid});
  }
  return bvh;
}

bool Bvh::check_invariants(const TriangleMesh& mesh) const {
  if (nodes_.empty()) return false;
  std::vector<int> seen(mesh.triangle_count(), 0);
  for (const auto& node : nodes_) {
    if (node.is_leaf()) {
      if (node.count > kMaxLeafSize) return false;
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const auto tri = order_[i];
        if (!node.box.contains(mesh.triangle_bounds(tri))) return false;
        ++seen[tri];
      }
    } else {
      if (node.first + 1 >= nodes_.size()) return false;
      if (!node.box.contains(nodes_[node.first].box) || !node.box.contains(nodes_[node.first + 1].box)) {
        return false;
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

std::optional<Hit> ray_cast(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& origin, const Vec3& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) throw InvalidInput("ray_cast: direction must be unit length");
  const Vec3 inv_dir = direction.cwiseInverse();
  const auto& nodes = bvh.nodes();

  std::optional<Hit> best;
  double t_limit = std::numeric_limits<double>::infinity();
  double entry = 0.0;
  if (!slab_entry(nodes[0].box, origin, inv_dir, direction, t_limit, entry)) return std::nullopt;

  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = nodes[stack[--top]];
    if (!slab_entry(node.box, origin, inv_dir, direction, t_limit, entry)) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = bvh.order()[i];
        if (const auto t = intersect_triangle(mesh, tri, origin, direction)) {
          const Hit hit{*t, tri};
          if (!best || nearer(hit, *best)) {
            best = hit;
            t_limit = best->t + kHitTieTolerance;
          }
        }
      }
      continue;
    }
    double t_left = 0.0;
    double t_right = 0.0;
    const bool hit_left = slab_entry(nodes[node.first].box, origin, inv_dir, direction, t_limit, t_left);
    const bool hit_right = slab_entry(nodes[node.first + 1].box, origin, inv_dir, direction, t_limit, t_right);
    if (hit_left && hit_right) {
      // Nearer child on top of the stack.
      if (t_left <= t_right) {
        stack[top++] = node.first + 1;
        stack[top++] = node.first;
      } else {
        stack[top++] = node.first;
        stack[top++] = node.first + 1;
      }
    } else if (hit_left) {
      stack[top++] = node.first;
    } else if (hit_right) {
      stack[top++] = node.first + 1;
    }
  }
  return best;
}

}  // namespace sparsedc
