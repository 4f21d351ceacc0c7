#include "sparsedc/mesh.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "sparsedc/error.hpp"
#include "sparsedc/io.hpp"
#include "sparsedc/rng.hpp"
#include "text_util.hpp"

namespace sparsedc {

namespace {
constexpr double kMinTriangleArea = 1e-12;
}

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (triangles_.empty()) throw InvalidInput("mesh has no triangles");
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw InvalidInput("mesh vertex is not finite");
  }
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (auto idx : triangles_[t]) {
      if (idx >= vertices_.size()) {
        throw InvalidInput("triangle " + std::to_string(t) + " references vertex " + std::to_string(idx) +
                           " of " + std::to_string(vertices_.size()));
      }
    }
    if (!(area(t) > kMinTriangleArea)) {
      throw InvalidInput("triangle " + std::to_string(t) + " is degenerate");
    }
    bounds_.extend(triangle_bounds(t));
  }
}

Aabb TriangleMesh::triangle_bounds(std::size_t tri) const {
  Aabb b;
  for (int k = 0; k < 3; ++k) b.extend(corner(tri, k));
  return b;
}

Vec3 TriangleMesh::centroid(std::size_t tri) const {
  return (corner(tri, 0) + corner(tri, 1) + corner(tri, 2)) / 3.0;
}

Vec3 TriangleMesh::normal(std::size_t tri) const {
  return (corner(tri, 1) - corner(tri, 0)).cross(corner(tri, 2) - corner(tri, 0)).normalized();
}

double TriangleMesh::area(std::size_t tri) const {
  return 0.5 * (corner(tri, 1) - corner(tri, 0)).cross(corner(tri, 2) - corner(tri, 0)).norm();
}

TriangleMesh parse_obj(std::istream& in, const std::string& source) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tokens = detail::split_ws(body);
    const auto& kind = tokens.front();
    if (kind == "v") {
      if (tokens.size() < 4) throw ParseError(source, line_no, "vertex needs 3 coordinates");
      Vec3 p;
      for (int i = 0; i < 3; ++i) {
        const auto value = detail::parse_double(tokens[static_cast<std::size_t>(i) + 1]);
        if (!value || !std::isfinite(*value)) throw ParseError(source, line_no, "bad vertex coordinate");
        p[i] = *value;
      }
      vertices.push_back(p);
    } else if (kind == "f") {
      if (tokens.size() < 4) throw ParseError(source, line_no, "face needs at least 3 vertices");
      std::vector<std::uint32_t> face;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        // "i", "i/t", "i//n", "i/t/n": only the position index matters.
        const auto ref = tokens[i].substr(0, tokens[i].find('/'));
        const auto idx = detail::parse_int(ref);
        if (!idx || *idx == 0) throw ParseError(source, line_no, "bad face index '" + std::string(tokens[i]) + "'");
        const long long n = static_cast<long long>(vertices.size());
        const long long resolved = *idx > 0 ? *idx - 1 : n + *idx;
        if (resolved < 0 || resolved >= n) {
          throw ParseError(source, line_no,
                           "face index " + std::to_string(*idx) + " out of range (" + std::to_string(n) +
                               " vertices defined)");
        }
        face.push_back(static_cast<std::uint32_t>(resolved));
      }
      for (std::size_t k = 1; k + 1 < face.size(); ++k) triangles.push_back({face[0], face[k], face[k + 1]});
    }
    // vn, vt, o, g, s, usemtl, mtllib, ...: ignored
  }
  if (triangles.empty()) throw ParseError(source + ": mesh contains no faces");
  try {
    return TriangleMesh(std::move(vertices), std::move(triangles));
  } catch (const InvalidInput& e) {
    throw ParseError(source + ": " + e.what());
  }
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh: " + path.string());
  return parse_obj(in, path.string());
}

void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ostringstream out;
  for (const auto& v : mesh.vertices()) {
    out << "v " << detail::format_double(v.x()) << ' ' << detail::format_double(v.y()) << ' '
        << detail::format_double(v.z()) << '\n';
  }
  for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  write_text_file(path, out.str());
}

TriangleMesh make_terrain_mesh(int cells, double extent, double amplitude, std::uint64_t seed) {
  if (cells < 1 || !(extent > 0.0)) throw InvalidInput("terrain: need cells >= 1 and extent > 0");
  Rng rng(derive_seed(seed, Stream::Synthetic));
  const double step = extent / cells;
  const double k = 2.0 * std::numbers::pi / extent;
  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(cells + 1) * static_cast<std::size_t>(cells + 1));
  for (int j = 0; j <= cells; ++j) {
    for (int i = 0; i <= cells; ++i) {
      const double x = i * step;
      const double y = j * step;
      const double h = amplitude * (0.5 * std::sin(1.3 * k * x) * std::cos(0.9 * k * y) +
                                    0.3 * std::sin(3.1 * k * x + 0.7) + 0.2 * std::cos(4.3 * k * y + 1.1));
      const double jitter = 0.15 * amplitude * (rng.uniform() - 0.5);
      vertices.emplace_back(x, y, h + jitter);
    }
  }
  std::vector<Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells) * 2);
  const auto id = [cells](int i, int j) { return static_cast<std::uint32_t>(j * (cells + 1) + i); };
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

TriangleMesh make_ground_quad(double x0, double y0, double x1, double y1, double z) {
  std::vector<Vec3> v{{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
  return TriangleMesh(std::move(v), {{0, 1, 2}, {0, 2, 3}});
}

}  // namespace sparsedc
