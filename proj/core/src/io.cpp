#include "sparsedc/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sparsedc/error.hpp"
#include "text_util.hpp"

namespace sparsedc {

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

std::string read_header_token(std::istream& in, const std::string& source) {
  std::string token;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      while (in.get(c) && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) {
      token.push_back(c);
      break;
    }
  }
  while (in.get(c) && !std::isspace(static_cast<unsigned char>(c))) token.push_back(c);
  if (token.empty()) throw ParseError(source + ": truncated header");
  return token;
}

int parse_dimension(const std::string& token, const std::string& source) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value <= 0) {
    throw ParseError(source + ": bad image dimension '" + token + "'");
  }
  return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

void write_pfm(std::ostream& out, const Grid<float>& raster) {
  out << "Pf\n" << raster.width() << ' ' << raster.height() << "\n-1.0\n";
  std::vector<std::uint32_t> row(static_cast<std::size_t>(raster.width()));
  for (int y = raster.height() - 1; y >= 0; --y) {
    for (int x = 0; x < raster.width(); ++x) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(raster(x, y));
      if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
      row[static_cast<std::size_t>(x)] = bits;
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(std::uint32_t)));
  }
}

Grid<float> read_pfm(std::istream& in, const std::string& source) {
  const std::string magic = read_header_token(in, source);
  if (magic != "Pf") throw ParseError(source + ": not a grayscale PFM (magic '" + magic + "')");
  const int width = parse_dimension(read_header_token(in, source), source);
  const int height = parse_dimension(read_header_token(in, source), source);
  const std::string scale_token = read_header_token(in, source);
  double scale = 0.0;
  try {
    scale = std::stod(scale_token);
  } catch (const std::exception&) {
    throw ParseError(source + ": bad PFM scale '" + scale_token + "'");
  }
  if (scale == 0.0) throw ParseError(source + ": PFM scale must be nonzero");
  const bool file_little = scale < 0.0;
  const bool swap = file_little != (std::endian::native == std::endian::little);

  Grid<float> raster(width, height);
  std::vector<std::uint32_t> row(static_cast<std::size_t>(width));
  for (int y = height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(std::uint32_t)));
    if (!in) throw ParseError(source + ": truncated PFM pixel data");
    for (int x = 0; x < width; ++x) {
      std::uint32_t bits = row[static_cast<std::size_t>(x)];
      if (swap) bits = byteswap32(bits);
      raster(x, y) = std::bit_cast<float>(bits);
    }
  }
  return raster;
}

void write_pfm(const std::filesystem::path& path, const Grid<float>& raster) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write_pfm(out, raster);
  if (!out) throw IoError("write failed: " + path.string());
}

Grid<float> read_pfm(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return read_pfm(in, path.string());
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.storage().data()),
            static_cast<std::streamsize>(image.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

GrayImage read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  const std::string source = path.string();
  const std::string magic = read_header_token(in, source);
  if (magic != "P5") throw ParseError(source + ": only binary PGM (P5) is supported");
  const int width = parse_dimension(read_header_token(in, source), source);
  const int height = parse_dimension(read_header_token(in, source), source);
  const int maxval = parse_dimension(read_header_token(in, source), source);
  if (maxval > 255) throw ParseError(source + ": 16-bit PGM is not supported");
  GrayImage image(width, height);
  in.read(reinterpret_cast<char*>(image.storage().data()), static_cast<std::streamsize>(image.size()));
  if (!in) throw ParseError(source + ": truncated PGM pixel data");
  if (maxval != 255) {
    for (auto& v : image.values()) v = static_cast<std::uint8_t>(std::min(255, v * 255 / maxval));
  }
  return image;
}

std::string camera_to_json(const CameraFile& camera) {
  const auto& k = camera.intrinsics;
  const auto& r = camera.pose.rotation();
  const auto& t = camera.pose.translation();
  nlohmann::ordered_json j;
  j["fx"] = k.fx;
  j["fy"] = k.fy;
  j["cx"] = k.cx;
  j["cy"] = k.cy;
  j["width"] = k.width;
  j["height"] = k.height;
  j["rotation"] = {r(0, 0), r(0, 1), r(0, 2), r(1, 0), r(1, 1), r(1, 2), r(2, 0), r(2, 1), r(2, 2)};
  j["translation"] = {t.x(), t.y(), t.z()};
  j["frame_tag"] = std::string(to_string(camera.pose.tag()));
  return j.dump(2) + "\n";
}

CameraFile camera_from_json(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  try {
    CameraFile cam;
    cam.intrinsics.fx = j.at("fx").get<double>();
    cam.intrinsics.fy = j.at("fy").get<double>();
    cam.intrinsics.cx = j.at("cx").get<double>();
    cam.intrinsics.cy = j.at("cy").get<double>();
    cam.intrinsics.width = j.at("width").get<int>();
    cam.intrinsics.height = j.at("height").get<int>();
    cam.intrinsics.validate();
    const auto rot = j.at("rotation").get<std::vector<double>>();
    const auto trans = j.at("translation").get<std::vector<double>>();
    if (rot.size() != 9) throw InvalidInput("rotation must have 9 entries");
    if (trans.size() != 3) throw InvalidInput("translation must have 3 entries");
    Mat3 r;
    r << rot[0], rot[1], rot[2], rot[3], rot[4], rot[5], rot[6], rot[7], rot[8];
    cam.pose = Pose(r, Vec3(trans[0], trans[1], trans[2]),
                    frame_tag_from_string(j.at("frame_tag").get<std::string>()));
    return cam;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw ParseError(source + ": " + e.what());
  }
}

void write_camera(const std::filesystem::path& path, const CameraFile& camera) {
  write_text_file(path, camera_to_json(camera));
}

CameraFile read_camera(const std::filesystem::path& path) {
  return camera_from_json(read_text_file(path), path.string());
}

void write_cloud_csv(const std::filesystem::path& path, const PointCloud& cloud) {
  std::string text = "x,y,z\n";
  for (const Vec3& p : cloud.points) {
    text += detail::format_double(p.x()) + "," + detail::format_double(p.y()) + "," +
            detail::format_double(p.z()) + "\n";
  }
  write_text_file(path, text);
}

PointCloud read_cloud_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::string source = path.string();
  PointCloud cloud;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (const auto& line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv(line);
    if (!header_seen) {
      if (fields.size() != 3 || detail::trim(fields[0]) != "x" || detail::trim(fields[1]) != "y" ||
          detail::trim(fields[2]) != "z") {
        throw ParseError(source, line_no, "expected header 'x,y,z'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError(source, line_no, "expected 3 fields");
    Vec3 p;
    for (int i = 0; i < 3; ++i) {
      const auto v = detail::parse_double(fields[static_cast<std::size_t>(i)]);
      if (!v || !std::isfinite(*v)) throw ParseError(source, line_no, "non-numeric coordinate");
      p[i] = *v;
    }
    cloud.points.push_back(p);
  }
  if (!header_seen) throw ParseError(source, 1, "missing header 'x,y,z'");
  return cloud;
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace sparsedc
