#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "../common/oracles.hpp"
#include "sparsedc/sparse_depth.hpp"

using namespace sparsedc;

namespace {

Grid<float> checkerboard(int cells, int cell_px) {
  Grid<float> g(cells * cell_px, cells * cell_px, 0.0f);
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) g(x, y) = ((x / cell_px + y / cell_px) % 2) ? 1.0f : 0.0f;
  }
  return g;
}

Grid<float> noise_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Grid<float> g(w, h);
  for (auto& v : g.values()) v = static_cast<float>(rng.uniform());
  return g;
}

}  // namespace

TEST(Corners, ConstantImageHasNone) {
  EXPECT_TRUE(detect_corners(Grid<float>(64, 48, 0.3f), SamplerConfig{}).empty());
  EXPECT_TRUE(detect_corners(GrayImage(64, 48, 200), SamplerConfig{}).empty());
}

TEST(Corners, SingleBrightPixel) {
  GrayImage img(128, 128, 0);
  img(50, 60) = 255;
  const auto corners = detect_corners(img, SamplerConfig{});
  ASSERT_FALSE(corners.empty());
  EXPECT_LE(std::abs(corners[0].u - 50), 1);
  EXPECT_LE(std::abs(corners[0].v - 60), 1);

  // Oracle: arg max of the directly computed response.
  double best = -1;
  int bx = -1, by = -1;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      const double s = oracle::shi_tomasi_at(img, 128, 128, x, y) / (255.0 * 255.0);
      if (s > best) best = s, bx = x, by = y;
    }
  }
  EXPECT_EQ(corners[0].u, bx);
  EXPECT_EQ(corners[0].v, by);
}

TEST(Corners, ResponseMatchesOracle) {
  const Grid<float> img = noise_image(40, 30, 8);
  const Grid<double> r = min_eigen_response(img);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const double want = std::max(0.0, oracle::shi_tomasi_at(img, 40, 30, x, y));
      EXPECT_NEAR(r(x, y), want, 1e-9 * std::max(1.0, want)) << x << "," << y;
    }
  }
}

TEST(Corners, CheckerboardInteriorCount) {
  SamplerConfig cfg;
  cfg.corner_min_dist = 10;
  const auto corners = detect_corners(checkerboard(8, 20), cfg);
  const double expected = 7 * 7;
  EXPECT_GE(static_cast<double>(corners.size()), 0.9 * expected);
  EXPECT_LE(static_cast<double>(corners.size()), 1.1 * expected);
}

TEST(Corners, SuppressionAndCap) {
  SamplerConfig cfg;
  cfg.corner_min_dist = 6;
  cfg.corner_max_candidates = 15;
  const auto corners = detect_corners(noise_image(64, 64, 9), cfg);
  EXPECT_LE(corners.size(), 15u);
  for (std::size_t i = 0; i < corners.size(); ++i) {
    if (i > 0) EXPECT_GE(corners[i - 1].score, corners[i].score);
    for (std::size_t j = 0; j < i; ++j) {
      const double du = corners[i].u - corners[j].u, dv = corners[i].v - corners[j].v;
      EXPECT_GE(du * du + dv * dv, 36.0);
    }
  }
}

TEST(Sample, SingleCornerSingleMeasurement) {
  SamplerConfig cfg;
  cfg.n_min = cfg.n_max = 1;
  DepthMap gt(10, 10);
  gt.set(3, 4, 5.0f);
  Rng rng(1);
  const auto m = sample_measurements({{3, 4, 1.0}}, gt, cfg, rng);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].u, 3);
  EXPECT_EQ(m[0].v, 4);
  EXPECT_EQ(m[0].depth, 5.0);
}

TEST(Sample, InvalidGroundTruthGivesEmpty) {
  DepthMap gt(10, 10);
  Rng rng(1);
  EXPECT_TRUE(sample_measurements({{1, 1, 1.0}, {5, 5, 0.5}}, gt, SamplerConfig{}, rng).empty());
}

TEST(Sample, DistinctCornersAndCountRange) {
  DepthMap gt(50, 50);
  std::vector<Corner> corners;
  for (int i = 0; i < 40; ++i) {
    gt.set(i, i, 1.0f + static_cast<float>(i));
    corners.push_back({i, i, 1.0});
  }
  SamplerConfig cfg;
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const auto m = sample_measurements(corners, gt, cfg, rng);
    ASSERT_GE(m.size(), 1u);
    ASSERT_LE(m.size(), 10u);
    std::vector<int> us;
    for (const auto& s : m) {
      us.push_back(s.u);
      EXPECT_EQ(s.depth, gt.at(s.u, s.v));
    }
    std::sort(us.begin(), us.end());
    EXPECT_EQ(std::adjacent_find(us.begin(), us.end()), us.end());
  }
}

TEST(Sample, CountIsUniform) {
  SamplerConfig cfg;
  Rng rng(3);
  std::vector<std::size_t> bins(10, 0);
  for (int i = 0; i < 20000; ++i) {
    const int n = draw_measurement_count(cfg, rng);
    ASSERT_GE(n, 1);
    ASSERT_LE(n, 10);
    ++bins[static_cast<std::size_t>(n - 1)];
  }
  EXPECT_GT(oracle::chi_square_uniform_p(bins), 0.001);
}

TEST(Noise, ZeroProbabilityOrUnitFactorIsIdentity) {
  const SparseMeasurementSet in{{1, 2, 3.5, MeasurementSource::Simulated}, {4, 5, 10.0, MeasurementSource::Simulated}};
  SamplerConfig cfg;
  cfg.p_noise = 0;
  Rng rng(4);
  EXPECT_EQ(apply_noise(in, cfg, rng), in);
  cfg.p_noise = 1;
  cfg.n_low = cfg.n_high = 1.0;
  EXPECT_EQ(apply_noise(in, cfg, rng), in);
}

TEST(Noise, UniformFactorStatistics) {
  SparseMeasurementSet in(10000, {0, 0, 10.0, MeasurementSource::Simulated});
  SamplerConfig cfg;
  cfg.p_noise = 1;
  cfg.n_low = 0.9;
  cfg.n_high = 1.1;
  Rng rng(5);
  const auto out = apply_noise(in, cfg, rng);
  double sum = 0;
  for (const auto& m : out) {
    EXPECT_GE(m.depth, 9.0);
    EXPECT_LE(m.depth, 11.0);
    sum += m.depth;
  }
  const double mean = sum / 10000.0;
  EXPECT_GE(mean, 9.98);
  EXPECT_LE(mean, 10.02);
}

TEST(Rasterize, PatchArithmetic) {
  const TransformConfig tc;
  const auto ch = rasterize_channel({{17, 3, 4.0, MeasurementSource::Simulated}}, 56, 42, 14, 900, tc);
  const float want = static_cast<float>(encode_sparse_value(4.0, 900, tc).value);
  for (int y = 0; y < 42; ++y) {
    for (int x = 0; x < 56; ++x) {
      const bool inside = x >= 14 && x <= 27 && y >= 0 && y <= 13;
      EXPECT_EQ(ch.values(x, y), inside ? want : 0.0f) << x << "," << y;
    }
  }
}

TEST(Rasterize, EmptyAndNearestWins) {
  const TransformConfig tc;
  const auto empty = rasterize_channel({}, 28, 28, 14, 900, tc);
  for (float v : empty.values.values()) EXPECT_EQ(v, 0.0f);
  const auto two = rasterize_channel(
      {{1, 1, 4.0, MeasurementSource::Simulated}, {5, 6, 2.0, MeasurementSource::Simulated}}, 28, 28, 14, 900, tc);
  EXPECT_EQ(two.values(0, 0), static_cast<float>(encode_sparse_value(2.0, 900, tc).value));
}

TEST(Rasterize, ValuesInRangeAndClampCount) {
  const TransformConfig tc;
  const auto ch = rasterize_channel(
      {{1, 1, 0.1, MeasurementSource::Simulated}, {20, 20, 30.0, MeasurementSource::Simulated}}, 28, 28, 14, 900, tc);
  EXPECT_EQ(ch.n_clamped, 1u);
  for (float v : ch.values.values()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(Rasterize, Errors) {
  const TransformConfig tc;
  EXPECT_THROW(rasterize_channel({}, 30, 28, 14, 900, tc), InvalidInput);
  EXPECT_THROW(rasterize_channel({{28, 0, 1.0, MeasurementSource::Simulated}}, 28, 28, 14, 900, tc), InvalidInput);
}

TEST(MeasurementCsv, RoundTrip) {
  const auto dir = oracle::fresh_dir("meas_csv");
  const SparseMeasurementSet in{{1, 2, 3.25, MeasurementSource::Simulated}, {7, 9, 0.1 + 0.2, MeasurementSource::Radar}};
  write_measurements_csv(dir / "m.csv", in);
  EXPECT_EQ(oracle::file_bytes(dir / "m.csv").substr(0, 19), "u,v,depth_m,source\n");
  EXPECT_EQ(read_measurements_csv(dir / "m.csv"), in);
  write_text_file(dir / "bad.csv", "u,v,depth_m,source\n1,2,-3,simulated\n");
  EXPECT_THROW(read_measurements_csv(dir / "bad.csv"), ParseError);
  std::filesystem::remove_all(dir);
}

TEST(Pipeline, DeterministicUnderFixedSeed) {
  GrayImage img(64, 64);
  Rng rng(10);
  for (auto& v : img.values()) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  DepthMap gt(64, 64);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) gt.set(x, y, 1.0f + 0.1f * static_cast<float>(x + y));
  }
  SamplerConfig cfg;
  cfg.seed = 77;
  const auto a = simulate_measurements(img, gt, cfg, 3);
  const auto b = simulate_measurements(img, gt, cfg, 3);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.empty());
  const TransformConfig tc;
  EXPECT_EQ(rasterize_channel(a, 70, 70, 14, 500, tc).values, rasterize_channel(b, 70, 70, 14, 500, tc).values);
}
