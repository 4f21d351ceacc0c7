#pragma once

// Value-only loss evaluators, templated on the scalar so the finite-difference
// check can run them in binary128. The analytic gradients in losses.cpp do not
// go through these classes.

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sparsedc/losses.hpp"

namespace sparsedc::detail {

inline double scalar_abs(double x) { return std::fabs(x); }
inline double scalar_log(double x) { return std::log(x); }
__float128 scalar_abs(__float128 x);
__float128 scalar_log(__float128 x);

void check_loss_inputs(const Grid<double>& pred, const Grid<double>& gt, const Mask& mask);

template <typename T>
class ScaleInvariantTerm {
 public:
  ScaleInvariantTerm(const Grid<double>& gt, const Mask& mask, double lambda) : lambda_(lambda) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      valid_.push_back(i);
      log_gt_.push_back(scalar_log(static_cast<T>(gt[i])));
    }
  }

  T value(std::span<const T> pred) const {
    const auto [sum, sum_sq] = sums(pred);
    return combine(sum, sum_sq);
  }

  /// Sums of r and r^2 at `pred`.
  std::pair<T, T> sums(std::span<const T> pred) const {
    T sum = 0;
    T sum_sq = 0;
    for (std::size_t k = 0; k < valid_.size(); ++k) {
      const T r = scalar_log(pred[valid_[k]]) - log_gt_[k];
      sum += r;
      sum_sq += r * r;
    }
    return {sum, sum_sq};
  }

  /// Value after one valid pixel changes from `before` to `after`, given the
  /// sums at the unperturbed prediction. O(1) instead of O(N).
  T value_replacing(const std::pair<T, T>& base, T before, T after, T log_gt) const {
    const T r_old = scalar_log(before) - log_gt;
    const T r_new = scalar_log(after) - log_gt;
    return combine(base.first - r_old + r_new, base.second - r_old * r_old + r_new * r_new);
  }

  T combine(T sum, T sum_sq) const {
    const T n = static_cast<T>(valid_.size());
    return sum_sq / n - static_cast<T>(lambda_) * (sum * sum) / (n * n);
  }

 private:
  double lambda_;
  std::vector<std::size_t> valid_;
  std::vector<T> log_gt_;
};

template <typename T>
class GradientMatchingTerm {
 public:
  GradientMatchingTerm(const Grid<double>& gt, const Mask& mask, int scales)
      : width_(gt.width()), height_(gt.height()), scales_(scales), mask_(mask) {
    gt_.resize(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) gt_[i] = static_cast<T>(gt[i]);
    for (auto m : mask.values()) n_valid_ += m ? 1 : 0;
  }

  T value(std::span<const T> pred) const {
    int w = width_;
    int h = height_;
    std::vector<T> r(pred.size());
    std::vector<std::uint8_t> m(mask_.values().begin(), mask_.values().end());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = m[i] ? pred[i] - gt_[i] : T(0);

    T total = 0;
    for (int level = 0; level < scales_; ++level) {
      if (level > 0) {
        const int cw = w / 2;
        const int ch = h / 2;
        if (cw == 0 || ch == 0) break;
        std::vector<T> cr(static_cast<std::size_t>(cw) * static_cast<std::size_t>(ch), T(0));
        std::vector<std::uint8_t> cm(cr.size(), 0);
        for (int y = 0; y < ch; ++y) {
          for (int x = 0; x < cw; ++x) {
            T acc = 0;
            int count = 0;
            for (int dy = 0; dy < 2; ++dy) {
              for (int dx = 0; dx < 2; ++dx) {
                const std::size_t fi = static_cast<std::size_t>(2 * y + dy) * w + (2 * x + dx);
                if (m[fi]) {
                  acc += r[fi];
                  ++count;
                }
              }
            }
            const std::size_t ci = static_cast<std::size_t>(y) * cw + x;
            if (count > 0) {
              cr[ci] = acc / static_cast<T>(count);
              cm[ci] = 1;
            }
          }
        }
        r = std::move(cr);
        m = std::move(cm);
        w = cw;
        h = ch;
      }
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          if (!m[i]) continue;
          if (x + 1 < w && m[i + 1]) total += scalar_abs(r[i + 1] - r[i]);
          if (y + 1 < h && m[i + w]) total += scalar_abs(r[i + w] - r[i]);
        }
      }
    }
    return total / static_cast<T>(n_valid_);
  }

 private:
  int width_;
  int height_;
  int scales_;
  const Mask& mask_;
  std::vector<T> gt_;
  std::size_t n_valid_ = 0;
};

}  // namespace sparsedc::detail
