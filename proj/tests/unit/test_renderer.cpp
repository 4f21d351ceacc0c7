#include <gtest/gtest.h>

#include <cmath>

#include "../common/oracles.hpp"
#include "sparsedc/dataset.hpp"
#include "sparsedc/pose_sampler.hpp"
#include "sparsedc/renderer.hpp"

using namespace sparsedc;

namespace {

const CameraIntrinsics kIntr{40, 40, 16, 12, 32, 24};

Pose nadir_at(const Vec3& c) { return Pose(nadir_rotation({}), c, FrameTag::WorldFromCam); }

}  // namespace

TEST(Render, ConstantPlaneUnderNadirCamera) {
  const TriangleMesh m = make_ground_quad(-100, -100, 100, 100, 0);
  const Bvh bvh = build_bvh(m);
  const DepthMap d = render_depth(bvh, m, kIntr, nadir_at(Vec3(1, 2, 7.5)));
  ASSERT_EQ(d.valid_count(), static_cast<std::size_t>(32 * 24));
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 32; ++x) EXPECT_NEAR(d.at(x, y), 7.5f, 1e-5f);
  }
}

TEST(Render, LookingAwayIsAllInvalid) {
  const TriangleMesh m = make_ground_quad(-100, -100, 100, 100, 0);
  const Bvh bvh = build_bvh(m);
  const Pose up(Mat3::Identity(), Vec3(0, 0, 5), FrameTag::WorldFromCam);  // optical axis +z
  const RenderResult r = render(bvh, m, kIntr, up);
  EXPECT_EQ(r.depth.valid_count(), 0u);
  for (auto t : r.triangle.values()) EXPECT_EQ(t, -1);
}

TEST(Render, QuadMatchesPerTriangleBruteForce) {
  const TriangleMesh m({Vec3(-3, -2, 0), Vec3(4, -3, 0.5), Vec3(3, 4, 1), Vec3(-2, 3, -0.5)}, {{0, 1, 2}, {0, 2, 3}});
  const Bvh bvh = build_bvh(m);
  const Mat3 r = nadir_rotation({0.1, -0.15, 0.7});
  const Pose pose(r, Vec3(0.2, 0.1, 6), FrameTag::WorldFromCam);
  const RenderResult res = render(bvh, m, kIntr, pose);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 32; ++x) {
      const CameraRay ray = camera_ray(kIntr, pose, x, y);
      std::optional<Hit> best;
      for (std::uint32_t t = 0; t < 2; ++t) {
        if (auto h = intersect_triangle(m, t, ray.origin, ray.direction)) {
          const Hit cand{*h, t};
          if (!best || nearer(cand, *best)) best = cand;
        }
      }
      ASSERT_EQ(res.depth.valid(x, y), best.has_value()) << x << "," << y;
      if (best) {
        EXPECT_EQ(res.triangle(x, y), static_cast<std::int32_t>(best->triangle));
        EXPECT_EQ(res.depth.at(x, y), static_cast<float>(best->t * ray.depth_scale));
      }
    }
  }
}

TEST(Render, DepthIsZNotRange) {
  const TriangleMesh m = make_ground_quad(-100, -100, 100, 100, 0);
  const Bvh bvh = build_bvh(m);
  const RenderResult r = render(bvh, m, kIntr, nadir_at(Vec3(0, 0, 10)));
  const CameraRay corner = camera_ray(kIntr, nadir_at(Vec3(0, 0, 10)), 0, 0);
  EXPECT_LT(corner.depth_scale, 1.0);
  EXPECT_NEAR(r.depth.at(0, 0), 10.0f, 1e-5f);
}

TEST(Render, ThreadCountDoesNotChangeOutput) {
  const TriangleMesh m = make_terrain_mesh(16, 50, 5, 4);
  const Bvh bvh = build_bvh(m);
  const Pose pose = nadir_at(Vec3(25, 25, 30));
  const RenderResult a = render(bvh, m, kIntr, pose, 1);
  const RenderResult b = render(bvh, m, kIntr, pose, 3);
  EXPECT_EQ(a.depth, b.depth);
  EXPECT_EQ(a.triangle, b.triangle);
}

TEST(Shade, MissesAreBlackHitsAreLit) {
  const TriangleMesh m = make_ground_quad(-1, -1, 1, 1, 0);
  const Bvh bvh = build_bvh(m);
  const Pose pose = nadir_at(Vec3(0, 0, 1));
  const RenderResult r = render(bvh, m, kIntr, pose);
  const GrayImage img = shade_lambertian(m, r, pose, kIntr);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (r.triangle(x, y) < 0) {
        EXPECT_EQ(img(x, y), 0);
      } else {
        EXPECT_GT(img(x, y), 0);
      }
    }
  }
}

TEST(PoseSampler, FlatMeshHeightsInRange) {
  const TriangleMesh m = make_ground_quad(0, 0, 100, 100, 3.0);
  const Bvh bvh = build_bvh(m);
  PoseSamplerConfig cfg;
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const PoseSample s = sample_pose(cfg, bvh, m, rng);
    EXPECT_DOUBLE_EQ(s.surface_z, 3.0);
    const double h = s.pose.center().z() - 3.0;
    EXPECT_GE(h, cfg.z_min - 1e-9);
    EXPECT_LE(h, cfg.z_max + 1e-9);
    EXPECT_NEAR(h, s.height_above_surface, 1e-9);
  }
}

TEST(PoseSampler, ZeroTiltLooksStraightDown) {
  const TriangleMesh m = make_ground_quad(0, 0, 100, 100, 0);
  const Bvh bvh = build_bvh(m);
  PoseSamplerConfig cfg;
  cfg.theta_xy_deg = 0;
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const PoseSample s = sample_pose(cfg, bvh, m, rng);
    const Vec3 axis = s.pose.rotation() * Vec3(0, 0, 1);
    EXPECT_NEAR(axis.dot(Vec3(0, 0, -1)), 1.0, 1e-12);
  }
}

TEST(PoseSampler, TiltBoundsAndYawUniform) {
  const TriangleMesh m = make_ground_quad(0, 0, 100, 100, 0);
  const Bvh bvh = build_bvh(m);
  PoseSamplerConfig cfg;
  Rng rng(5);
  const double theta = cfg.theta_xy_deg * std::numbers::pi / 180.0;
  std::vector<std::size_t> bins(12, 0);
  for (int i = 0; i < 6000; ++i) {
    const PoseSample s = sample_pose(cfg, bvh, m, rng);
    EXPECT_LE(std::abs(s.angles.tilt_x), theta);
    EXPECT_LE(std::abs(s.angles.tilt_y), theta);
    ASSERT_GE(s.angles.yaw, 0.0);
    ASSERT_LT(s.angles.yaw, 2 * std::numbers::pi);
    ++bins[static_cast<std::size_t>(s.angles.yaw / (2 * std::numbers::pi) * 12)];
  }
  EXPECT_GT(oracle::chi_square_uniform_p(bins), 0.001);
}

TEST(PoseSampler, NadirRotationRoundTrip) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const NadirAngles a{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(0, 2 * std::numbers::pi)};
    const Mat3 r = nadir_rotation(a);
    EXPECT_TRUE(is_rotation(r, 1e-12));
    const NadirAngles b = decompose_nadir_rotation(r);
    EXPECT_NEAR(a.tilt_x, b.tilt_x, 1e-9);
    EXPECT_NEAR(a.tilt_y, b.tilt_y, 1e-9);
    EXPECT_NEAR(std::remainder(a.yaw - b.yaw, 2 * std::numbers::pi), 0.0, 1e-9);
  }
}

TEST(PoseSampler, GivesUpWithoutSurface) {
  // A vertical wall has no surface under any horizontal position.
  const TriangleMesh wall({Vec3(0, 0, 0), Vec3(10, 0, 0), Vec3(0, 0, 10)}, {{0, 1, 2}});
  const Bvh wall_bvh = build_bvh(wall);
  PoseSamplerConfig cfg;
  Rng rng(7);
  EXPECT_THROW(sample_pose(cfg, wall_bvh, wall, rng), Error);
}

TEST(PoseSampler, ConfigValidation) {
  PoseSamplerConfig cfg;
  cfg.z_min = 5;
  cfg.z_max = 4;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.theta_xy_deg = 95;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

class DatasetTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = oracle::fresh_dir("dataset"); }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
  TriangleMesh mesh_ = make_terrain_mesh(16, 100, 8, 2);
  CameraIntrinsics intr_{30, 30, 16, 12, 32, 24};
  PoseSamplerConfig cfg_ = [] {
    PoseSamplerConfig c;
    c.n_frames = 10;
    c.seed = 42;
    return c;
  }();
};

TEST_F(DatasetTest, WritesEveryFrameAndManifest) {
  const DatasetManifest man = generate_dataset(mesh_, "terrain", cfg_, intr_, dir_ / "a");
  EXPECT_EQ(man.frames.size(), 10u);
  std::size_t pfm = 0, json = 0, pgm = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir_ / "a")) {
    const auto ext = e.path().extension();
    pfm += ext == ".pfm";
    pgm += ext == ".pgm";
    json += ext == ".json" && e.path().filename() != kManifestName;
  }
  EXPECT_EQ(pfm, 10u);
  EXPECT_EQ(pgm, 10u);
  EXPECT_EQ(json, 10u);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "a" / kManifestName));
}

TEST_F(DatasetTest, RerunsAndThreadCountsAreByteIdentical) {
  generate_dataset(mesh_, "terrain", cfg_, intr_, dir_ / "a", 1);
  generate_dataset(mesh_, "terrain", cfg_, intr_, dir_ / "b", 1);
  generate_dataset(mesh_, "terrain", cfg_, intr_, dir_ / "c", 2);
  const std::string a = oracle::tree_bytes(dir_ / "a");
  EXPECT_EQ(a, oracle::tree_bytes(dir_ / "b"));
  EXPECT_EQ(a, oracle::tree_bytes(dir_ / "c"));
}

TEST_F(DatasetTest, FramesMatchDirectRender) {
  const DatasetManifest man = generate_dataset(mesh_, "terrain", cfg_, intr_, dir_ / "a");
  const Bvh bvh = build_bvh(mesh_);
  for (const FrameFiles& f : man.frames) {
    const CameraFile cam = read_camera(dir_ / "a" / f.pose);
    EXPECT_EQ(cam.intrinsics, intr_);
    EXPECT_EQ(read_depth(dir_ / "a" / f.depth), render_depth(bvh, mesh_, intr_, cam.pose));
  }
}

TEST_F(DatasetTest, ManifestRoundTrip) {
  const DatasetManifest man = generate_dataset(mesh_, "terrain", cfg_, intr_, dir_ / "a");
  const DatasetManifest back = DatasetManifest::from_json(read_text_file(dir_ / "a" / kManifestName));
  EXPECT_EQ(back.to_json(), man.to_json());
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.n_frames, 10u);
}

TEST_F(DatasetTest, MissingMeshNamesPath) {
  try {
    generate_dataset(dir_ / "nope.obj", cfg_, intr_, dir_ / "a");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("nope.obj"), std::string::npos);
  }
}
