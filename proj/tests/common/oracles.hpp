#pragma once

// Reference implementations used only by the tests. They are written without
// the library's helpers so that agreement means something.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "sparsedc/mesh.hpp"

namespace oracle {

using V3 = std::array<double, 3>;

inline V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline V3 to_v3(const sparsedc::Vec3& v) { return {v.x(), v.y(), v.z()}; }

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  std::int64_t triangle = -1;
};

// Plane intersection followed by an edge-function inside test.
inline std::optional<double> plane_hit(const V3& a, const V3& b, const V3& c, const V3& o, const V3& d) {
  const V3 n = cross(sub(b, a), sub(c, a));
  const double denom = dot(n, d);
  if (denom == 0.0) return std::nullopt;
  const double t = dot(n, sub(a, o)) / denom;
  if (!(t > 1e-6)) return std::nullopt;
  const V3 p{o[0] + t * d[0], o[1] + t * d[1], o[2] + t * d[2]};
  const double e0 = dot(n, cross(sub(b, a), sub(p, a)));
  const double e1 = dot(n, cross(sub(c, b), sub(p, b)));
  const double e2 = dot(n, cross(sub(a, c), sub(p, c)));
  if ((e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0)) return t;
  return std::nullopt;
}

// Exhaustive nearest hit; ties within 1e-9 go to the lower index.
inline Hit brute_force_cast(const sparsedc::TriangleMesh& mesh, const V3& o, const V3& d) {
  Hit best;
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    const auto t = plane_hit(to_v3(mesh.corner(i, 0)), to_v3(mesh.corner(i, 1)), to_v3(mesh.corner(i, 2)), o, d);
    if (!t) continue;
    if (*t < best.t - 1e-9) best = {*t, static_cast<std::int64_t>(i)};
  }
  return best;
}

// Random triangle soup inside [0, 10]^3 with edge lengths of about one meter.
inline sparsedc::TriangleMesh random_soup(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> pos(0.0, 10.0);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  std::vector<sparsedc::Vec3> verts;
  std::vector<sparsedc::Triangle> tris;
  while (tris.size() < n) {
    const sparsedc::Vec3 c(pos(gen), pos(gen), pos(gen));
    const sparsedc::Vec3 a = c + sparsedc::Vec3(off(gen), off(gen), off(gen));
    const sparsedc::Vec3 b = c + sparsedc::Vec3(off(gen), off(gen), off(gen));
    const sparsedc::Vec3 e = c + sparsedc::Vec3(off(gen), off(gen), off(gen));
    if ((b - a).cross(e - a).norm() < 1e-3) continue;
    const auto base = static_cast<std::uint32_t>(verts.size());
    verts.insert(verts.end(), {a, b, e});
    tris.push_back({base, base + 1, base + 2});
  }
  return sparsedc::TriangleMesh(std::move(verts), std::move(tris));
}

// Minimum eigenvalue of a symmetric 2x2 matrix [[a, b], [b, c]].
inline double min_eig(double a, double b, double c) {
  return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

// Shi-Tomasi response at one pixel, straight from the definition:
// Sobel gradients with clamped borders, summed over a 3x3 window.
template <typename Img>
double shi_tomasi_at(const Img& img, int w, int h, int x, int y) {
  auto px = [&](int xx, int yy) {
    xx = std::clamp(xx, 0, w - 1);
    yy = std::clamp(yy, 0, h - 1);
    return static_cast<double>(img(xx, yy));
  };
  double sxx = 0, sxy = 0, syy = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int cx = std::clamp(x + dx, 0, w - 1);
      const int cy = std::clamp(y + dy, 0, h - 1);
      const double gx = (px(cx + 1, cy - 1) + 2 * px(cx + 1, cy) + px(cx + 1, cy + 1)) -
                        (px(cx - 1, cy - 1) + 2 * px(cx - 1, cy) + px(cx - 1, cy + 1));
      const double gy = (px(cx - 1, cy + 1) + 2 * px(cx, cy + 1) + px(cx + 1, cy + 1)) -
                        (px(cx - 1, cy - 1) + 2 * px(cx, cy - 1) + px(cx + 1, cy - 1));
      sxx += gx * gx;
      sxy += gx * gy;
      syy += gy * gy;
    }
  }
  return min_eig(sxx, sxy, syy);
}

// Upper-tail p-value of Pearson's chi-square for equiprobable bins.
inline double chi_square_uniform_p(const std::vector<std::size_t>& counts) {
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0;
  for (auto c : counts) stat += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Concatenation of every regular file under dir, in name order, with names.
inline std::string tree_bytes(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) {
    out += std::filesystem::relative(f, dir).string();
    out += '\n';
    out += file_bytes(f);
  }
  return out;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sparsedc_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
