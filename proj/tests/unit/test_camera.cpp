#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "../common/oracles.hpp"
#include "sparsedc/camera.hpp"
#include "sparsedc/io.hpp"
#include "sparsedc/rng.hpp"

using namespace sparsedc;

namespace {

CameraIntrinsics cam(double f = 100.0) { return {f, f, 320.0, 240.0, 640, 480}; }

}  // namespace

TEST(Intrinsics, ValidateRejectsBadValues) {
  EXPECT_NO_THROW(cam().validate());
  EXPECT_THROW((CameraIntrinsics{0, 100, 320, 240, 640, 480}).validate(), InvalidInput);
  EXPECT_THROW((CameraIntrinsics{100, 100, 640, 240, 640, 480}).validate(), InvalidInput);
  EXPECT_THROW((CameraIntrinsics{100, 100, 320, 0, 640, 480}).validate(), InvalidInput);
  EXPECT_DOUBLE_EQ((CameraIntrinsics{400, 600, 320, 240, 640, 480}).focal(), 500.0);
}

TEST(Project, PrincipalPointRay) {
  const auto p = project(cam(), Vec3(0, 0, 5));
  ASSERT_TRUE(p);
  EXPECT_DOUBLE_EQ(p->u, 320.0);
  EXPECT_DOUBLE_EQ(p->v, 240.0);
  EXPECT_DOUBLE_EQ(p->z, 5.0);
}

TEST(Project, DirectArithmetic) {
  const auto p = project(cam(), Vec3(1, 0, 2));
  ASSERT_TRUE(p);
  EXPECT_DOUBLE_EQ(p->u, 370.0);
}

TEST(Project, BehindCameraAndOutsideFrame) {
  EXPECT_FALSE(project(cam(), Vec3(0, 0, -1)));
  EXPECT_FALSE(project(cam(), Vec3(0, 0, 0)));
  EXPECT_FALSE(project(cam(), Vec3(100, 0, 1)));
}

TEST(Project, UnprojectRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(0, 640), v = rng.uniform(0, 480), z = rng.uniform(0.1, 100);
    const auto p = project(cam(350), unproject(cam(350), u, v, z));
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->u, u, 1e-9);
    EXPECT_NEAR(p->v, v, 1e-9);
    EXPECT_NEAR(p->z, z, 1e-9);
  }
}

TEST(PoseTest, RejectsNonRotation) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = -1;  // reflection
  EXPECT_THROW(Pose(m, Vec3::Zero(), FrameTag::WorldFromCam), InvalidInput);
  m = Mat3::Identity() * 1.01;
  EXPECT_THROW(Pose(m, Vec3::Zero(), FrameTag::WorldFromCam), InvalidInput);
}

TEST(PoseTest, InverseAndTags) {
  const Mat3 r = Eigen::AngleAxisd(0.3, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const Pose wc(r, Vec3(1, -2, 3), FrameTag::WorldFromCam);
  const Pose cw = wc.as_cam_from_world();
  EXPECT_EQ(cw.tag(), FrameTag::CamFromWorld);
  const Vec3 p(0.5, 0.25, 4.0);
  EXPECT_LT((wc.camera_to_world(p) - cw.camera_to_world(p)).norm(), 1e-12);
  EXPECT_LT((wc.world_to_camera(wc.camera_to_world(p)) - p).norm(), 1e-12);
  EXPECT_LT((wc.center() - Vec3(1, -2, 3)).norm(), 1e-12);
  EXPECT_EQ(frame_tag_from_string(to_string(FrameTag::CamFromWorld)), FrameTag::CamFromWorld);
  EXPECT_THROW(frame_tag_from_string("nope"), InvalidInput);
}

TEST(Reproject, ZBufferKeepsNearest) {
  PointCloud cloud;
  cloud.points = {Vec3(0, 0, 5), Vec3(0, 0, 2), Vec3(0, 0, 7)};
  const DepthMap d = reproject_cloud(cam(), Pose::identity(), cloud);
  EXPECT_FLOAT_EQ(d.at(320, 240), 2.0f);
  EXPECT_EQ(d.valid_count(), 1u);
}

TEST(Reproject, EmptyCloudAllInvalid) {
  const DepthMap d = reproject_cloud(cam(), Pose::identity(), PointCloud{});
  EXPECT_EQ(d.valid_count(), 0u);
  EXPECT_EQ(d.width(), 640);
}

TEST(Reproject, UnprojectRoundTrip) {
  const CameraIntrinsics intr{80, 90, 32.5, 24.5, 64, 48};
  Rng rng(7);
  DepthMap depth(64, 48);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      if (rng.uniform() < 0.8) depth.set(x, y, static_cast<float>(rng.uniform(0.5, 80)));
    }
  }
  const Mat3 r = Eigen::AngleAxisd(1.1, Vec3(0.2, -1, 0.4).normalized()).toRotationMatrix();
  const Pose pose(r, Vec3(3, 4, 5), FrameTag::CamFromWorld);
  const DepthMap back = reproject_cloud(intr, pose, unproject_depth(intr, pose, depth));
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      ASSERT_EQ(back.valid(x, y), depth.valid(x, y)) << x << "," << y;
      if (depth.valid(x, y)) EXPECT_NEAR(back.at(x, y), depth.at(x, y), 1e-5 * depth.at(x, y));
    }
  }
}

TEST(Canonical, Examples) {
  const TransformConfig cfg;
  EXPECT_DOUBLE_EQ(canonical_depth(10, 900, cfg), 10.0);
  EXPECT_DOUBLE_EQ(canonical_depth(10, 450, cfg), 20.0);
  EXPECT_THROW(canonical_depth(0, 900, cfg), InvalidInput);
  EXPECT_THROW(canonical_depth(1, -1, cfg), InvalidInput);
}

TEST(Canonical, LinearInDepth) {
  const TransformConfig cfg;
  for (double a : {0.5, 2.0, 4.0}) EXPECT_EQ(canonical_depth(a * 3.0, 600, cfg), a * canonical_depth(3.0, 600, cfg));
}

TEST(Encode, Examples) {
  const TransformConfig cfg;
  EXPECT_DOUBLE_EQ(encode_sparse_value(0.5, 900, cfg).value, 1.0);
  EXPECT_FALSE(encode_sparse_value(0.5, 900, cfg).clamped);
  EXPECT_DOUBLE_EQ(encode_sparse_value(80, 900, cfg).value, 0.00625);
  EXPECT_THROW(encode_sparse_value(0, 900, cfg), InvalidInput);
  const EncodedDepth e = encode_sparse_value(0.2, 900, cfg);
  EXPECT_TRUE(e.clamped);
  EXPECT_EQ(e.value, 1.0);
}

TEST(Decode, Examples) {
  const TransformConfig cfg;
  EXPECT_DOUBLE_EQ(decode_sparse_value(1.0, 900, cfg), 0.5);
  EXPECT_DOUBLE_EQ(decode_sparse_value(0.5, 900, cfg), 1.0);
  EXPECT_THROW(decode_sparse_value(0.0, 900, cfg), InvalidInput);
  EXPECT_THROW(decode_sparse_value(1.5, 900, cfg), InvalidInput);
}

TEST(Encode, RoundTripBothWays) {
  const TransformConfig cfg;
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.uniform(cfg.d_min, cfg.d_max);
    EXPECT_NEAR(decode_sparse_value(encode_sparse_value(d, 900, cfg).value, 900, cfg), d, 1e-6 * d);
    const double s = rng.uniform(1e-3, 1.0);
    EXPECT_NEAR(encode_sparse_value(decode_sparse_value(s, 900, cfg), 900, cfg).value, s, 1e-6 * s);
  }
}

TEST(TransformConfigTest, Validate) {
  EXPECT_THROW((TransformConfig{900, 1.0, 0.5}).validate(), InvalidInput);
  EXPECT_THROW((TransformConfig{0, 0.5, 80}).validate(), InvalidInput);
}

TEST(Pfm, RoundTripBitExactAndBottomRowFirst) {
  Grid<float> g(3, 2);
  g(0, 0) = 1.5f;   // top-left
  g(2, 1) = 7.25f;  // bottom-right
  g(1, 1) = 0.0f;
  std::stringstream ss;
  write_pfm(ss, g);
  const std::string bytes = ss.str();
  const std::string header = "Pf\n3 2\n-1.0\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  ASSERT_EQ(bytes.size(), header.size() + 6 * 4);
  float first_stored = 0;
  std::memcpy(&first_stored, bytes.data() + header.size() + 2 * 4, 4);  // bottom row, x=2
  EXPECT_EQ(first_stored, 7.25f);
  std::stringstream in(bytes);
  EXPECT_EQ(read_pfm(in), g);
}

TEST(Pfm, RejectsMalformed) {
  std::stringstream bad("P6\n1 1\n255\n");
  EXPECT_THROW(read_pfm(bad), ParseError);
  std::stringstream short_data("Pf\n2 2\n-1.0\nabc");
  EXPECT_THROW(read_pfm(short_data), ParseError);
}

TEST(DepthMapTest, InvalidEncodedAsZero) {
  Grid<float> g(2, 1);
  g[0] = std::nanf("");
  g[1] = -3.0f;
  const DepthMap d(g);
  EXPECT_EQ(d.at(0, 0), 0.0f);
  EXPECT_EQ(d.at(1, 0), 0.0f);
  EXPECT_EQ(d.valid_count(), 0u);
}

TEST(CameraJson, RoundTrip) {
  const Mat3 r = Eigen::AngleAxisd(0.7, Vec3(0, 1, 1).normalized()).toRotationMatrix();
  const CameraFile c{cam(512.25), Pose(r, Vec3(1.0 / 3.0, 2, -7), FrameTag::CamFromWorld)};
  const CameraFile back = camera_from_json(camera_to_json(c));
  EXPECT_EQ(back.intrinsics, c.intrinsics);
  EXPECT_EQ(back.pose.tag(), FrameTag::CamFromWorld);
  EXPECT_EQ(back.pose.rotation(), c.pose.rotation());
  EXPECT_EQ(back.pose.translation(), c.pose.translation());
  EXPECT_THROW(camera_from_json("{\"fx\": 1}"), ParseError);
}

TEST(CloudCsv, RoundTrip) {
  const auto dir = oracle::fresh_dir("cloud_csv");
  PointCloud cloud;
  cloud.points = {Vec3(0.1, -2, 3.5), Vec3(1e-3, 4, 5)};
  write_cloud_csv(dir / "c.csv", cloud);
  EXPECT_EQ(oracle::file_bytes(dir / "c.csv").substr(0, 6), "x,y,z\n");
  const PointCloud back = read_cloud_csv(dir / "c.csv");
  ASSERT_EQ(back.points.size(), 2u);
  EXPECT_EQ(back.points[0], cloud.points[0]);
  EXPECT_EQ(back.points[1], cloud.points[1]);
  std::filesystem::remove_all(dir);
}

TEST(Pgm, RoundTrip) {
  const auto dir = oracle::fresh_dir("pgm");
  GrayImage img(5, 3, 0);
  img(4, 2) = 255;
  img(1, 0) = 17;
  write_pgm(dir / "a.pgm", img);
  EXPECT_EQ(read_pgm(dir / "a.pgm"), img);
  EXPECT_THROW(read_pgm(dir / "missing.pgm"), IoError);
  std::filesystem::remove_all(dir);
}
