#pragma once

#include <filesystem>
#include <vector>

#include "sparsedc/raster.hpp"
#include "sparsedc/rng.hpp"
#include "sparsedc/sparse_depth.hpp"

namespace sparsedc {

/// Planar [channels, height, width] image.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int channels, int height, int width, double fill = 0.0);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }

  double& operator()(int c, int y, int x) { return data_[index(c, y, x)]; }
  double operator()(int c, int y, int x) const { return data_[index(c, y, x)]; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool operator==(const Tensor3&) const = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Patch-embedding convolution weights, kernel laid out [embed_dim][in_channels][patch][patch].
struct EmbedWeights {
  int embed_dim = 0;
  int in_channels = 0;
  int patch = 0;
  std::vector<float> kernel;
  std::vector<float> bias;

  float& k(int e, int c, int i, int j) { return kernel[offset(e, c, i, j)]; }
  float k(int e, int c, int i, int j) const { return kernel[offset(e, c, i, j)]; }
  std::size_t offset(int e, int c, int i, int j) const {
    return ((static_cast<std::size_t>(e) * in_channels + c) * patch + i) * patch + j;
  }

  /// in_channels in {3, 4}, patch >= 1, sizes consistent, all entries finite.
  void validate() const;

  /// Gaussian(0, scale^2) kernel and bias; for tests and the embed-check tool.
  static EmbedWeights random(int embed_dim, int in_channels, int patch, double scale, Rng& rng);
};

/// Default scale of the randomly initialized sparse-depth kernel slice.
inline constexpr double kDefaultInitScale = 0.02;

/// Appends a fourth input channel drawn i.i.d. from Gaussian(0, init_scale^2);
/// channels 0-2 and the bias are copied bit for bit.
EmbedWeights concat_weights(const EmbedWeights& rgb_weights, double init_scale, Rng& rng);

struct TokenGrid {
  int cols = 0;
  int rows = 0;
  int embed_dim = 0;
  std::vector<double> tokens;  ///< [rows * cols][embed_dim], patches in row-major order

  std::size_t n_patches() const { return static_cast<std::size_t>(cols) * rows; }
  double at(std::size_t patch, int e) const { return tokens[patch * embed_dim + e]; }
};

/// Non-overlapping stride-`patch` convolution: token = bias + sum kernel * patch pixels.
/// Accumulates channel by channel in index order, so an all-zero trailing
/// channel leaves every token bitwise unchanged.
TokenGrid embed(const Tensor3& image, const EmbedWeights& weights);

/// Stacks RGB (values in [0, 1]) with the sparse-depth channel.
Tensor3 assemble_input(const Tensor3& rgb, const SparseDepthChannel& channel);

/// Grayscale [0, 255] image replicated into three [0, 1] channels.
Tensor3 gray_to_rgb(const GrayImage& gray);

/// Largest multiple of `patch` not exceeding `size` (640 -> 630, 480 -> 476 for 14).
int floor_to_multiple(int size, int patch);

/// Bilinear resampling (pixel-center aligned) of every channel.
Tensor3 resize_bilinear(const Tensor3& image, int out_height, int out_width);

/// Flat little-endian float32 file (kernel then bias) plus a JSON sidecar at
/// `<path>.json` describing the shapes.
void save_weights(const std::filesystem::path& path, const EmbedWeights& weights);
EmbedWeights load_weights(const std::filesystem::path& path);

}  // namespace sparsedc
