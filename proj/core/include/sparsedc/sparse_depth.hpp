#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "sparsedc/camera.hpp"
#include "sparsedc/io.hpp"
#include "sparsedc/raster.hpp"
#include "sparsedc/rng.hpp"

namespace sparsedc {

/// Training-time sparse sensor simulation parameters.
///
/// 1 to 10 points per frame. Noise and detector defaults are guesses; tune
/// them through the run config.
struct SamplerConfig {
  int n_min = 1;
  int n_max = 10;
  double p_noise = 0.5;
  double n_low = 0.9;
  double n_high = 1.1;
  double corner_quality = 0.01;
  double corner_min_dist = 10.0;
  int corner_max_candidates = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Corner {
  int u = 0;
  int v = 0;
  double score = 0.0;
};

/// Shi-Tomasi response: minimum eigenvalue of the 3x3-window structure tensor
/// built from 3x3 Sobel gradients (replicated borders).
Grid<double> min_eigen_response(const Grid<float>& image);

/// Good-features-to-track: threshold at corner_quality * max response, then
/// greedy suppression within corner_min_dist, strongest first (ties row-major),
/// capped at corner_max_candidates.
std::vector<Corner> detect_corners(const Grid<float>& image, const SamplerConfig& cfg);
std::vector<Corner> detect_corners(const GrayImage& image, const SamplerConfig& cfg);

enum class MeasurementSource { Simulated, Radar, Landmark, File };

std::string_view to_string(MeasurementSource source);
MeasurementSource measurement_source_from_string(std::string_view s);

struct SparseMeasurement {
  int u = 0;
  int v = 0;
  double depth = 0.0;  ///< meters
  MeasurementSource source = MeasurementSource::Simulated;

  bool operator==(const SparseMeasurement&) const = default;
};

using SparseMeasurementSet = std::vector<SparseMeasurement>;

/// Uniform integer in [n_min, n_max].
int draw_measurement_count(const SamplerConfig& cfg, Rng& rng);

/// Draws n, then min(n, available) distinct corners with valid ground truth.
SparseMeasurementSet sample_measurements(const std::vector<Corner>& corners, const DepthMap& depth_gt,
                                         const SamplerConfig& cfg, Rng& rng);

/// With probability p_noise per measurement, depth *= uniform[n_low, n_high].
SparseMeasurementSet apply_noise(SparseMeasurementSet measurements, const SamplerConfig& cfg, Rng& rng);

/// Corners on `image`, then sample_measurements and apply_noise drawing from
/// derive_seed(cfg.seed, SparseSampling, frame) and (cfg.seed, SparseNoise, frame).
SparseMeasurementSet simulate_measurements(const GrayImage& image, const DepthMap& depth_gt, const SamplerConfig& cfg,
                                           std::uint64_t frame = 0);

/// Full-resolution 4th input channel: each measurement fills its patch with the
/// encoded inverse canonical depth; 0 means no measurement.
struct SparseDepthChannel {
  int patch_size = 0;
  Grid<float> values;
  std::size_t n_clamped = 0;  ///< measurements closer than d_min after the canonical rescale

  int width() const { return values.width(); }
  int height() const { return values.height(); }
};

/// Patch (floor(u/P), floor(v/P)); in collisions the smaller metric depth wins.
/// Throws InvalidInput unless width and height are multiples of patch_size.
SparseDepthChannel rasterize_channel(const SparseMeasurementSet& measurements, int width, int height,
                                     int patch_size, double focal, const TransformConfig& cfg);

/// CSV with header "u,v,depth_m,source".
void write_measurements_csv(const std::filesystem::path& path, const SparseMeasurementSet& measurements);
SparseMeasurementSet read_measurements_csv(const std::filesystem::path& path);
std::string measurements_to_csv(const SparseMeasurementSet& measurements);

}  // namespace sparsedc
