#include <algorithm>
#include <cmath>

#include "sparsedc/sparse_depth.hpp"

namespace sparsedc {

namespace {

template <typename T>
T clamped(const Grid<T>& g, int x, int y) {
  return g(std::clamp(x, 0, g.width() - 1), std::clamp(y, 0, g.height() - 1));
}

}  // namespace

Grid<double> min_eigen_response(const Grid<float>& image) {
  const int w = image.width();
  const int h = image.height();
  Grid<double> ixx(w, h), iyy(w, h), ixy(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto p = [&](int dx, int dy) { return static_cast<double>(clamped(image, x + dx, y + dy)); };
      const double gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
      const double gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
      ixx(x, y) = gx * gx;
      iyy(x, y) = gy * gy;
      ixy(x, y) = gx * gy;
    }
  }
  Grid<double> response(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double a = 0.0, b = 0.0, c = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          a += clamped(ixx, x + dx, y + dy);
          b += clamped(ixy, x + dx, y + dy);
          c += clamped(iyy, x + dx, y + dy);
        }
      }
      const double half_trace = 0.5 * (a + c);
      const double half_diff = 0.5 * (a - c);
      response(x, y) = std::max(0.0, half_trace - std::sqrt(half_diff * half_diff + b * b));
    }
  }
  return response;
}

std::vector<Corner> detect_corners(const Grid<float>& image, const SamplerConfig& cfg) {
  cfg.validate();
  if (image.empty()) throw InvalidInput("detect_corners: empty image");
  const Grid<double> response = min_eigen_response(image);
  double max_score = 0.0;
  for (double s : response.values()) max_score = std::max(max_score, s);
  if (!(max_score > 0.0)) return {};

  const double threshold = cfg.corner_quality * max_score;
  std::vector<Corner> candidates;
  for (int y = 0; y < response.height(); ++y) {
    for (int x = 0; x < response.width(); ++x) {
      const double s = response(x, y);
      if (s > 0.0 && s >= threshold) candidates.push_back({x, y, s});
    }
  }
  // Candidates are generated row-major; stable sort keeps that order among equal scores.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Corner& a, const Corner& b) { return a.score > b.score; });

  const double min_dist2 = cfg.corner_min_dist * cfg.corner_min_dist;
  std::vector<Corner> kept;
  for (const Corner& c : candidates) {
    if (static_cast<int>(kept.size()) >= cfg.corner_max_candidates) break;
    const bool crowded = std::any_of(kept.begin(), kept.end(), [&](const Corner& k) {
      const double du = c.u - k.u;
      const double dv = c.v - k.v;
      return du * du + dv * dv < min_dist2;
    });
    if (!crowded) kept.push_back(c);
  }
  return kept;
}

std::vector<Corner> detect_corners(const GrayImage& image, const SamplerConfig& cfg) {
  Grid<float> f(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) f[i] = static_cast<float>(image[i]) / 255.0f;
  return detect_corners(f, cfg);
}

}  // namespace sparsedc
