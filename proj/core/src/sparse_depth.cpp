#include "sparsedc/sparse_depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsedc/error.hpp"
#include "text_util.hpp"

namespace sparsedc {

void SamplerConfig::validate() const {
  if (!(n_min >= 1 && n_min <= n_max)) throw InvalidInput("sampler: require 1 <= n_min <= n_max");
  if (!(p_noise >= 0.0 && p_noise <= 1.0)) throw InvalidInput("sampler: p_noise must lie in [0, 1]");
  if (!(n_low > 0.0 && n_low <= n_high)) throw InvalidInput("sampler: require 0 < n_low <= n_high");
  if (!(corner_quality >= 0.0 && corner_quality <= 1.0)) throw InvalidInput("sampler: corner_quality in [0, 1]");
  if (!(corner_min_dist >= 0.0)) throw InvalidInput("sampler: corner_min_dist must be >= 0");
  if (corner_max_candidates < 1) throw InvalidInput("sampler: corner_max_candidates must be >= 1");
}

std::string_view to_string(MeasurementSource source) {
  switch (source) {
    case MeasurementSource::Simulated: return "simulated";
    case MeasurementSource::Radar: return "radar";
    case MeasurementSource::Landmark: return "landmark";
    case MeasurementSource::File: return "file";
  }
  return "file";
}

MeasurementSource measurement_source_from_string(std::string_view s) {
  if (s == "simulated") return MeasurementSource::Simulated;
  if (s == "radar") return MeasurementSource::Radar;
  if (s == "landmark") return MeasurementSource::Landmark;
  if (s == "file") return MeasurementSource::File;
  throw InvalidInput("unknown measurement source '" + std::string(s) + "'");
}

int draw_measurement_count(const SamplerConfig& cfg, Rng& rng) {
  return static_cast<int>(rng.uniform_int(cfg.n_min, cfg.n_max));
}

SparseMeasurementSet sample_measurements(const std::vector<Corner>& corners, const DepthMap& depth_gt,
                                         const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  const int n = draw_measurement_count(cfg, rng);
  std::vector<const Corner*> usable;
  for (const Corner& c : corners) {
    if (c.u >= 0 && c.v >= 0 && c.u < depth_gt.width() && c.v < depth_gt.height() && depth_gt.valid(c.u, c.v)) {
      usable.push_back(&c);
    }
  }
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n), usable.size());
  // Partial Fisher-Yates: the first `take` slots become the sample.
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                             static_cast<std::int64_t>(usable.size()) - 1));
    std::swap(usable[i], usable[j]);
  }
  SparseMeasurementSet out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const Corner& c = *usable[i];
    out.push_back({c.u, c.v, static_cast<double>(depth_gt.at(c.u, c.v)), MeasurementSource::Simulated});
  }
  return out;
}

SparseMeasurementSet apply_noise(SparseMeasurementSet measurements, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  for (auto& m : measurements) {
    const bool active = rng.uniform() < cfg.p_noise;
    const double factor = rng.uniform(cfg.n_low, cfg.n_high);
    if (active) m.depth *= factor;
  }
  return measurements;
}

SparseMeasurementSet simulate_measurements(const GrayImage& image, const DepthMap& depth_gt, const SamplerConfig& cfg,
                                           std::uint64_t frame) {
  if (image.width() != depth_gt.width() || image.height() != depth_gt.height()) {
    throw InvalidInput("simulate_measurements: image and depth sizes differ");
  }
  const auto corners = detect_corners(image, cfg);
  Rng sample_rng(derive_seed(cfg.seed, Stream::SparseSampling, frame));
  Rng noise_rng(derive_seed(cfg.seed, Stream::SparseNoise, frame));
  return apply_noise(sample_measurements(corners, depth_gt, cfg, sample_rng), cfg, noise_rng);
}

SparseDepthChannel rasterize_channel(const SparseMeasurementSet& measurements, int width, int height,
                                     int patch_size, double focal, const TransformConfig& cfg) {
  cfg.validate();
  if (patch_size < 1 || width <= 0 || height <= 0) throw InvalidInput("rasterize_channel: bad dimensions");
  if (width % patch_size != 0 || height % patch_size != 0) {
    throw InvalidInput("rasterize_channel: " + std::to_string(width) + "x" + std::to_string(height) +
                       " is not divisible by patch size " + std::to_string(patch_size));
  }
  const int cols = width / patch_size;
  const int rows = height / patch_size;
  Grid<double> nearest(cols, rows, std::numeric_limits<double>::infinity());
  for (const auto& m : measurements) {
    if (m.u < 0 || m.v < 0 || m.u >= width || m.v >= height) {
      throw InvalidInput("rasterize_channel: measurement outside the image");
    }
    if (!(m.depth > 0.0)) throw InvalidInput("rasterize_channel: measurement depth must be positive");
    double& cell = nearest(m.u / patch_size, m.v / patch_size);
    cell = std::min(cell, m.depth);
  }
  SparseDepthChannel channel{patch_size, Grid<float>(width, height, 0.0f), 0};
  for (int py = 0; py < rows; ++py) {
    for (int px = 0; px < cols; ++px) {
      if (!std::isfinite(nearest(px, py))) continue;
      const EncodedDepth enc = encode_sparse_value(nearest(px, py), focal, cfg);
      channel.n_clamped += enc.clamped ? 1 : 0;
      const auto value = static_cast<float>(enc.value);
      for (int y = py * patch_size; y < (py + 1) * patch_size; ++y) {
        for (int x = px * patch_size; x < (px + 1) * patch_size; ++x) channel.values(x, y) = value;
      }
    }
  }
  return channel;
}

std::string measurements_to_csv(const SparseMeasurementSet& measurements) {
  std::string text = "u,v,depth_m,source\n";
  for (const auto& m : measurements) {
    text += std::to_string(m.u) + "," + std::to_string(m.v) + "," + detail::format_double(m.depth) + "," +
            std::string(to_string(m.source)) + "\n";
  }
  return text;
}

void write_measurements_csv(const std::filesystem::path& path, const SparseMeasurementSet& measurements) {
  write_text_file(path, measurements_to_csv(measurements));
}

SparseMeasurementSet read_measurements_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::string source = path.string();
  SparseMeasurementSet out;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (const auto& line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv(line);
    if (!header_seen) {
      if (f.size() != 4 || detail::trim(f[0]) != "u" || detail::trim(f[1]) != "v" ||
          detail::trim(f[2]) != "depth_m" || detail::trim(f[3]) != "source") {
        throw ParseError(source, line_no, "expected header 'u,v,depth_m,source'");
      }
      header_seen = true;
      continue;
    }
    if (f.size() != 4) throw ParseError(source, line_no, "expected 4 fields");
    const auto u = detail::parse_int(f[0]);
    const auto v = detail::parse_int(f[1]);
    const auto d = detail::parse_double(f[2]);
    if (!u || !v || *u < 0 || *v < 0) throw ParseError(source, line_no, "bad pixel coordinate");
    if (!d || !(*d > 0.0) || !std::isfinite(*d)) throw ParseError(source, line_no, "depth must be positive");
    try {
      out.push_back({static_cast<int>(*u), static_cast<int>(*v), *d,
                     measurement_source_from_string(detail::trim(f[3]))});
    } catch (const InvalidInput& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (!header_seen) throw ParseError(source, 1, "missing header");
  return out;
}

}  // namespace sparsedc
