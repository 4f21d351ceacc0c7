#include "sparsedc/patch_embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include <json.hpp>

#include "sparsedc/error.hpp"
#include "sparsedc/io.hpp"

namespace sparsedc {

Tensor3::Tensor3(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) throw InvalidInput("Tensor3: negative dimension");
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

void EmbedWeights::validate() const {
  if (in_channels != 3 && in_channels != 4) throw InvalidInput("embed weights: in_channels must be 3 or 4");
  if (patch < 1 || embed_dim < 1) throw InvalidInput("embed weights: patch and embed_dim must be >= 1");
  if (kernel.size() != static_cast<std::size_t>(embed_dim) * in_channels * patch * patch) {
    throw InvalidInput("embed weights: kernel size does not match shape");
  }
  if (bias.size() != static_cast<std::size_t>(embed_dim)) throw InvalidInput("embed weights: bias size mismatch");
  const auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(kernel.begin(), kernel.end(), finite) || !std::all_of(bias.begin(), bias.end(), finite)) {
    throw InvalidInput("embed weights: non-finite entry");
  }
}

EmbedWeights EmbedWeights::random(int embed_dim, int in_channels, int patch, double scale, Rng& rng) {
  EmbedWeights w{embed_dim, in_channels, patch, {}, {}};
  w.kernel.resize(static_cast<std::size_t>(embed_dim) * in_channels * patch * patch);
  for (auto& v : w.kernel) v = static_cast<float>(scale * rng.normal());
  w.bias.resize(static_cast<std::size_t>(embed_dim));
  for (auto& v : w.bias) v = static_cast<float>(scale * rng.normal());
  w.validate();
  return w;
}

EmbedWeights concat_weights(const EmbedWeights& rgb_weights, double init_scale, Rng& rng) {
  rgb_weights.validate();
  if (rgb_weights.in_channels != 3) throw InvalidInput("concat_weights: expected 3 input channels");
  if (!(init_scale >= 0.0)) throw InvalidInput("concat_weights: init_scale must be >= 0");
  EmbedWeights out{rgb_weights.embed_dim, 4, rgb_weights.patch, {}, rgb_weights.bias};
  out.kernel.resize(static_cast<std::size_t>(out.embed_dim) * 4 * out.patch * out.patch);
  for (int e = 0; e < out.embed_dim; ++e) {
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < out.patch; ++i) {
        for (int j = 0; j < out.patch; ++j) out.k(e, c, i, j) = rgb_weights.k(e, c, i, j);
      }
    }
    for (int i = 0; i < out.patch; ++i) {
      for (int j = 0; j < out.patch; ++j) out.k(e, 3, i, j) = static_cast<float>(init_scale * rng.normal());
    }
  }
  return out;
}

TokenGrid embed(const Tensor3& image, const EmbedWeights& weights) {
  weights.validate();
  if (image.channels() != weights.in_channels) {
    throw InvalidInput("embed: image has " + std::to_string(image.channels()) + " channels, weights expect " +
                       std::to_string(weights.in_channels));
  }
  const int p = weights.patch;
  if (image.height() % p != 0 || image.width() % p != 0 || image.height() == 0 || image.width() == 0) {
    throw InvalidInput("embed: image size is not a positive multiple of the patch size");
  }
  TokenGrid grid{image.width() / p, image.height() / p, weights.embed_dim, {}};
  grid.tokens.resize(grid.n_patches() * static_cast<std::size_t>(weights.embed_dim));
  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      const std::size_t patch_index = static_cast<std::size_t>(row) * grid.cols + col;
      for (int e = 0; e < weights.embed_dim; ++e) {
        double acc = weights.bias[static_cast<std::size_t>(e)];
        for (int c = 0; c < weights.in_channels; ++c) {
          for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
              acc += static_cast<double>(weights.k(e, c, i, j)) * image(c, row * p + i, col * p + j);
            }
          }
        }
        grid.tokens[patch_index * weights.embed_dim + e] = acc;
      }
    }
  }
  return grid;
}

Tensor3 assemble_input(const Tensor3& rgb, const SparseDepthChannel& channel) {
  if (rgb.channels() != 3) throw InvalidInput("assemble_input: expected a 3-channel image");
  if (rgb.height() != channel.height() || rgb.width() != channel.width()) {
    throw InvalidInput("assemble_input: image and sparse channel sizes differ");
  }
  Tensor3 out(4, rgb.height(), rgb.width());
  std::copy(rgb.storage().begin(), rgb.storage().end(), out.storage().begin());
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) out(3, y, x) = channel.values(x, y);
  }
  return out;
}

Tensor3 gray_to_rgb(const GrayImage& gray) {
  Tensor3 out(3, gray.height(), gray.width());
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      const double v = gray(x, y) / 255.0;
      for (int c = 0; c < 3; ++c) out(c, y, x) = v;
    }
  }
  return out;
}

int floor_to_multiple(int size, int patch) {
  if (patch < 1) throw InvalidInput("floor_to_multiple: patch must be >= 1");
  const int out = (size / patch) * patch;
  if (out == 0) throw InvalidInput("floor_to_multiple: image smaller than one patch");
  return out;
}

Tensor3 resize_bilinear(const Tensor3& image, int out_height, int out_width) {
  if (out_height < 1 || out_width < 1) throw InvalidInput("resize_bilinear: bad output size");
  if (out_height == image.height() && out_width == image.width()) return image;
  Tensor3 out(image.channels(), out_height, out_width);
  const double sy = static_cast<double>(image.height()) / out_height;
  const double sx = static_cast<double>(image.width()) / out_width;
  for (int y = 0; y < out_height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < out_width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width() - 1);
      const double wx = fx - x0;
      for (int c = 0; c < image.channels(); ++c) {
        const double top = (1 - wx) * image(c, y0, x0) + wx * image(c, y0, x1);
        const double bottom = (1 - wx) * image(c, y1, x0) + wx * image(c, y1, x1);
        out(c, y, x) = (1 - wy) * top + wy * bottom;
      }
    }
  }
  return out;
}

namespace {

std::filesystem::path sidecar(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".json";
  return p;
}

}  // namespace

void save_weights(const std::filesystem::path& path, const EmbedWeights& weights) {
  weights.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  const auto put = [&](const std::vector<float>& values) {
    for (float v : values) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
      unsigned char bytes[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                                static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
      out.write(reinterpret_cast<const char*>(bytes), 4);
    }
  };
  put(weights.kernel);
  put(weights.bias);
  if (!out) throw IoError("write failed: " + path.string());

  nlohmann::ordered_json meta;
  meta["dtype"] = "float32";
  meta["byte_order"] = "little";
  meta["embed_dim"] = weights.embed_dim;
  meta["in_channels"] = weights.in_channels;
  meta["patch"] = weights.patch;
  meta["kernel_shape"] = {weights.embed_dim, weights.in_channels, weights.patch, weights.patch};
  meta["bias_shape"] = {weights.embed_dim};
  meta["layout"] = "kernel then bias, row-major";
  write_text_file(sidecar(path), meta.dump(2) + "\n");
}

EmbedWeights load_weights(const std::filesystem::path& path) {
  EmbedWeights w;
  try {
    const auto meta = nlohmann::json::parse(read_text_file(sidecar(path)));
    if (meta.at("dtype").get<std::string>() != "float32" || meta.at("byte_order").get<std::string>() != "little") {
      throw ParseError(sidecar(path).string() + ": only little-endian float32 weights are supported");
    }
    w.embed_dim = meta.at("embed_dim").get<int>();
    w.in_channels = meta.at("in_channels").get<int>();
    w.patch = meta.at("patch").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(sidecar(path).string() + ": " + e.what());
  }
  if (w.embed_dim < 1 || w.patch < 1 || (w.in_channels != 3 && w.in_channels != 4)) {
    throw ParseError(sidecar(path).string() + ": invalid shape metadata");
  }
  const std::string blob = read_text_file(path);
  const std::size_t n_kernel = static_cast<std::size_t>(w.embed_dim) * w.in_channels * w.patch * w.patch;
  const std::size_t n_total = n_kernel + static_cast<std::size_t>(w.embed_dim);
  if (blob.size() != n_total * 4) {
    throw ParseError(path.string() + ": expected " + std::to_string(n_total * 4) + " bytes, found " +
                     std::to_string(blob.size()));
  }
  std::vector<float> values(n_total);
  for (std::size_t i = 0; i < n_total; ++i) {
    const auto* b = reinterpret_cast<const unsigned char*>(blob.data() + 4 * i);
    const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    values[i] = std::bit_cast<float>(bits);
  }
  w.kernel.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n_kernel));
  w.bias.assign(values.begin() + static_cast<std::ptrdiff_t>(n_kernel), values.end());
  w.validate();
  return w;
}

}  // namespace sparsedc
