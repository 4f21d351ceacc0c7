#include <benchmark/benchmark.h>

#include "sparsedc/bvh.hpp"
#include "sparsedc/losses.hpp"
#include "sparsedc/patch_embedding.hpp"
#include "sparsedc/pose_sampler.hpp"
#include "sparsedc/renderer.hpp"
#include "sparsedc/sparse_depth.hpp"

using namespace sparsedc;

namespace {

void BM_BuildBvh(benchmark::State& state) {
  const TriangleMesh mesh = make_terrain_mesh(static_cast<int>(state.range(0)), 200.0, 15.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_bvh(mesh));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mesh.triangle_count()));
}
BENCHMARK(BM_BuildBvh)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_RenderDepth(benchmark::State& state) {
  const TriangleMesh mesh = make_terrain_mesh(128, 200.0, 15.0, 1);
  const Bvh bvh = build_bvh(mesh);
  const CameraIntrinsics intr{500, 500, 320, 240, 640, 480};
  const Pose pose(nadir_rotation({0.1, -0.2, 0.7}), Vec3(100, 100, 60), FrameTag::WorldFromCam);
  for (auto _ : state) benchmark::DoNotOptimize(render_depth(bvh, mesh, intr, pose));
  state.SetItemsProcessed(state.iterations() * 640 * 480);
}
BENCHMARK(BM_RenderDepth)->Unit(benchmark::kMillisecond);

void BM_DetectCorners(benchmark::State& state) {
  Rng rng(2);
  Grid<float> img(640, 480);
  for (auto& v : img.values()) v = static_cast<float>(rng.uniform());
  const SamplerConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(detect_corners(img, cfg));
}
BENCHMARK(BM_DetectCorners)->Unit(benchmark::kMillisecond);

void BM_TotalLoss(benchmark::State& state) {
  Rng rng(3);
  const int n = static_cast<int>(state.range(0));
  const LossInstance in = random_loss_instance(n, n, 0.8, rng);
  const LossConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(total_loss(in.pred, in.gt, in.mask, cfg));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_TotalLoss)->Arg(64)->Arg(256);

void BM_FiniteDiffCheck(benchmark::State& state) {
  Rng rng(4);
  const LossInstance in = random_loss_instance(16, 16, 0.8, rng);
  const LossConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(finite_diff_check(LossKind::Total, in.pred, in.gt, in.mask, cfg, kDefaultFdEpsilon));
  }
}
BENCHMARK(BM_FiniteDiffCheck)->Unit(benchmark::kMillisecond);

void BM_Embed(benchmark::State& state) {
  Rng rng(5);
  const EmbedWeights w = EmbedWeights::random(static_cast<int>(state.range(0)), 4, 14, 0.02, rng);
  Tensor3 img(4, 476, 630);
  for (auto& v : img.storage()) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(embed(img, w));
}
BENCHMARK(BM_Embed)->Arg(32)->Arg(384)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
