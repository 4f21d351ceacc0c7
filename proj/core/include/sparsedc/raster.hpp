#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparsedc/error.hpp"

namespace sparsedc {

/// Row-major 2-D raster. Index (x, y) with x the column.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InvalidInput("Grid: negative dimensions");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Grid(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw InvalidInput("Grid: data length does not match width x height");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Mask = Grid<std::uint8_t>;

/// Dense metric z-depth raster. Invalid pixels hold exactly 0.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height) : values_(width, height, 0.0f) {}
  explicit DepthMap(Grid<float> values);

  int width() const { return values_.width(); }
  int height() const { return values_.height(); }

  float at(int x, int y) const { return values_(x, y); }
  bool valid(int x, int y) const { return is_valid_depth(values_(x, y)); }
  void set(int x, int y, float depth);
  void invalidate(int x, int y) { values_(x, y) = 0.0f; }

  const Grid<float>& raster() const { return values_; }
  std::size_t valid_count() const;
  Mask validity() const;

  bool operator==(const DepthMap&) const = default;

  static bool is_valid_depth(float v) { return v > 0.0f && std::isfinite(v); }

 private:
  Grid<float> values_;
};

inline DepthMap::DepthMap(Grid<float> values) : values_(std::move(values)) {
  for (auto& v : values_.values()) {
    if (!is_valid_depth(v)) v = 0.0f;
  }
}

inline void DepthMap::set(int x, int y, float depth) {
  values_(x, y) = is_valid_depth(depth) ? depth : 0.0f;
}

inline std::size_t DepthMap::valid_count() const {
  std::size_t n = 0;
  for (float v : values_.values()) n += is_valid_depth(v) ? 1 : 0;
  return n;
}

inline Mask DepthMap::validity() const {
  Mask m(width(), height(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = is_valid_depth(values_[i]) ? 1 : 0;
  return m;
}

}  // namespace sparsedc
