#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "sparsedc/dataset.hpp"
#include "sparsedc/error.hpp"
#include "sparsedc/eval.hpp"
#include "sparsedc/io.hpp"
#include "sparsedc/losses.hpp"
#include "sparsedc/mesh.hpp"
#include "sparsedc/patch_embedding.hpp"
#include "sparsedc/sparse_depth.hpp"

namespace fs = std::filesystem;

namespace sparsedc::cli {

namespace {

const std::string& pick(const std::string& flag, const std::string& config_value, const char* what) {
  const std::string& v = flag.empty() ? config_value : flag;
  if (v.empty()) throw InvalidInput(std::string("missing ") + what);
  return v;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

// Network input grid: each side floored to a multiple of the patch size, then resampled.
struct InputGrid {
  int width = 0;
  int height = 0;
  double sx = 1.0;
  double sy = 1.0;
};

InputGrid input_grid(int width, int height, int patch) {
  InputGrid g;
  g.width = floor_to_multiple(width, patch);
  g.height = floor_to_multiple(height, patch);
  g.sx = static_cast<double>(g.width) / width;
  g.sy = static_cast<double>(g.height) / height;
  return g;
}

SparseMeasurementSet to_grid(const SparseMeasurementSet& in, const InputGrid& g) {
  SparseMeasurementSet out = in;
  for (auto& m : out) {
    m.u = std::min(g.width - 1, static_cast<int>(std::floor((m.u + 0.5) * g.sx)));
    m.v = std::min(g.height - 1, static_cast<int>(std::floor((m.v + 0.5) * g.sy)));
  }
  return out;
}

double grid_focal(const CameraIntrinsics& intr, const InputGrid& g) { return 0.5 * (intr.fx * g.sx + intr.fy * g.sy); }

std::vector<std::string> pfm_names(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pfm") names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw IoError("no .pfm files in " + dir.string());
  return names;
}

}  // namespace

int gen_data(const Globals& g, const GenDataArgs& a) {
  PoseSamplerConfig cfg = g.config.pose_sampler;
  if (a.frames) cfg.n_frames = *a.frames;
  const fs::path out_dir = pick(a.out_dir, g.config.paths.out_dir, "--out");

  const auto start = std::chrono::steady_clock::now();
  DatasetManifest manifest;
  if (a.procedural) {
    const TriangleMesh mesh =
        make_terrain_mesh(64, 200.0, 15.0, derive_seed(g.config.seed, Stream::Synthetic, 0));
    fs::create_directories(out_dir);
    save_obj(out_dir / "scene.obj", mesh);
    manifest = generate_dataset(mesh, "procedural", cfg, g.config.camera, out_dir, g.threads);
  } else {
    const fs::path mesh_path = pick(a.mesh, g.config.paths.mesh, "--mesh");
    if (!fs::exists(mesh_path)) throw IoError("mesh not found: " + mesh_path.string());
    manifest = generate_dataset(mesh_path, cfg, g.config.camera, out_dir, g.threads);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "rendered %zu frames in %.2f s\n", manifest.frames.size(), seconds);
  std::cout << (out_dir / kManifestName).string() << "\n";
  return 0;
}

int sample_sparse(const Globals& g, const SampleSparseArgs& a) {
  const GrayImage image = read_pgm(pick(a.image, g.config.paths.image, "--image"));
  const DepthMap depth = read_depth(pick(a.depth, g.config.paths.depth_gt, "--depth"));
  if (image.width() != depth.width() || image.height() != depth.height()) {
    throw InvalidInput("image and depth sizes differ");
  }
  const CameraIntrinsics intr = a.camera.empty() ? g.config.camera : read_camera(a.camera).intrinsics;

  const SparseMeasurementSet meas = simulate_measurements(image, depth, g.config.sampler, a.frame);
  if (meas.empty()) std::cerr << "warning: no corner with valid depth; writing an empty measurement set\n";
  write_measurements_csv(a.out_csv, meas);

  if (!a.out_channel.empty()) {
    const InputGrid grid = input_grid(image.width(), image.height(), g.config.embed.patch);
    const SparseDepthChannel channel = rasterize_channel(to_grid(meas, grid), grid.width, grid.height,
                                                         g.config.embed.patch, grid_focal(intr, grid), g.config.transform);
    write_pfm(a.out_channel, channel.values);
    std::fprintf(stderr, "%zu measurements, channel %dx%d, %zu clamped\n", meas.size(), grid.width, grid.height,
                 channel.n_clamped);
  } else {
    std::fprintf(stderr, "%zu measurements\n", meas.size());
  }
  return 0;
}

int encode(const Globals& g, const EncodeArgs& a) {
  const double focal = a.focal ? *a.focal : g.config.camera.focal();
  nlohmann::ordered_json j;
  j["focal"] = focal;
  if (a.decode) {
    j["encoded"] = a.depth;
    j["depth_m"] = decode_sparse_value(a.depth, focal, g.config.transform);
  } else {
    const EncodedDepth enc = encode_sparse_value(a.depth, focal, g.config.transform);
    j["depth_m"] = a.depth;
    j["canonical_depth"] = canonical_depth(a.depth, focal, g.config.transform);
    j["encoded"] = enc.value;
    j["clamped"] = enc.clamped;
    if (enc.clamped) std::cerr << "warning: canonical depth below d_min, value clamped to 1\n";
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int eval(const Globals& g, const EvalArgs& a) {
  const fs::path pred_dir = pick(a.pred_dir, g.config.paths.pred_dir, "--pred");
  const fs::path gt_dir = pick(a.gt_dir, g.config.paths.gt_dir, "--gt");
  DatasetEval result;
  if (a.lift_dir.empty()) {
    result = evaluate_directories(pred_dir, gt_dir, g.config.eval.max_gt_depth, g.threads);
  } else {
    std::vector<FramePair> frames;
    for (const auto& name : pfm_names(gt_dir)) {
      const Grid<float> raw = read_pfm(pred_dir / name);
      Grid<double> affine(raw.width(), raw.height(), 0.0);
      for (std::size_t i = 0; i < raw.size(); ++i) {
        affine[i] = std::isfinite(raw[i]) ? raw[i] : std::nan("");
      }
      const fs::path csv = fs::path(a.lift_dir) / (fs::path(name).stem().string() + ".csv");
      const AffineFit fit = ls_affine_fit(affine, read_measurements_csv(csv), g.config.eval.fit_domain);
      std::fprintf(stderr, "%s: a=%.6g b=%.6g residual=%.3g (%zu points)\n", name.c_str(), fit.a, fit.b,
                   fit.residual_rms, fit.n_used);
      frames.push_back({apply_affine(affine, fit), read_depth(gt_dir / name)});
    }
    result = dataset_eval(frames, g.config.eval.max_gt_depth, g.threads);
    result.dataset = gt_dir.filename().string();
  }
  std::fprintf(stderr, "%zu frames: MAE %.6g m, RMSE %.6g m\n", result.frames.size(), result.mae_mean,
               result.rmse_mean);
  emit(eval_report_json(result), a.out);
  return 0;
}

int rank(const Globals& g, const RankArgs& a) {
  const RankTable input = read_rank_csv(pick(a.values, g.config.paths.values, "values CSV"));
  const RankTable table = rank_aggregate(input.methods, input.columns, input.values);
  emit(rank_table_to_csv(table), a.out);
  return 0;
}

int losscheck(const Globals& g, const LossCheckArgs& a) {
  Rng rng(derive_seed(g.config.seed, Stream::LossCheck, 0));
  const LossInstance inst = random_loss_instance(a.size, a.size, a.valid_fraction, rng);
  double worst = 0.0;
  for (LossKind kind : {LossKind::ScaleInvariant, LossKind::GradientMatching, LossKind::Total}) {
    const FiniteDiffResult r =
        finite_diff_check(kind, inst.pred, inst.gt, inst.mask, g.config.loss, a.epsilon, g.threads);
    std::printf("%-5s checked=%zu max_rel_error=%.3e\n", std::string(to_string(kind)).c_str(), r.n_checked,
                r.max_rel_error);
    worst = std::max(worst, r.max_rel_error);
  }
  std::printf("max_rel_error=%.3e\n", worst);
  if (!(worst < 1e-4)) {
    std::cerr << "gradient check failed: relative error above 1e-4\n";
    return 1;
  }
  return 0;
}

int embed_check(const Globals& g, const EmbedCheckArgs& a) {
  const EmbedConfig& ec = g.config.embed;
  Rng init(derive_seed(g.config.seed, Stream::EmbedInit, 0));
  const EmbedWeights w3 = a.weights.empty() ? EmbedWeights::random(ec.embed_dim, 3, ec.patch, 0.02, init)
                                            : load_weights(a.weights);
  if (w3.in_channels != 3) throw InvalidInput("embed-check expects 3-channel weights");
  Rng concat_rng(derive_seed(g.config.seed, Stream::EmbedInit, 1));
  const EmbedWeights w4 = concat_weights(w3, ec.init_scale, concat_rng);

  std::vector<Tensor3> images;
  InputGrid grid;
  if (!a.image.empty()) {
    const GrayImage gray = read_pgm(a.image);
    grid = input_grid(gray.width(), gray.height(), w3.patch);
    images.push_back(resize_bilinear(gray_to_rgb(gray), grid.height, grid.width));
  } else {
    Rng img_rng(derive_seed(g.config.seed, Stream::Synthetic, 1));
    for (std::uint64_t d = 0; d < a.draws; ++d) {
      Tensor3 t(3, 3 * w3.patch, 4 * w3.patch);
      for (auto& v : t.storage()) v = img_rng.uniform();
      images.push_back(std::move(t));
    }
  }

  bool equal = true;
  for (const Tensor3& rgb : images) {
    SparseDepthChannel empty{w3.patch, Grid<float>(rgb.width(), rgb.height(), 0.0f), 0};
    const TokenGrid t3 = embed(rgb, w3);
    const TokenGrid t4 = embed(assemble_input(rgb, empty), w4);
    equal = equal && t3.tokens == t4.tokens;
  }

  nlohmann::ordered_json j;
  j["embed_dim"] = w3.embed_dim;
  j["patch"] = w3.patch;
  j["images"] = images.size();
  j["tokens_per_image"] = images.front().width() / w3.patch * (images.front().height() / w3.patch);
  j["zero_channel_bitwise_equal"] = equal;

  if (!a.measurements.empty()) {
    if (a.image.empty()) throw InvalidInput("--measurements needs --image");
    const SparseMeasurementSet meas = read_measurements_csv(a.measurements);
    const SparseDepthChannel channel = rasterize_channel(to_grid(meas, grid), grid.width, grid.height, w3.patch,
                                                         grid_focal(g.config.camera, grid), g.config.transform);
    const TokenGrid base = embed(assemble_input(images.front(), SparseDepthChannel{
                                                                    w3.patch, Grid<float>(grid.width, grid.height, 0.0f), 0}),
                                 w4);
    const TokenGrid with = embed(assemble_input(images.front(), channel), w4);
    std::size_t changed = 0;
    for (std::size_t p = 0; p < with.n_patches(); ++p) {
      for (int e = 0; e < with.embed_dim; ++e) {
        if (with.at(p, e) != base.at(p, e)) {
          ++changed;
          break;
        }
      }
    }
    j["measurements"] = meas.size();
    j["tokens_changed_by_sparse_channel"] = changed;
  }
  std::cout << j.dump() << "\n";
  if (!equal) {
    std::cerr << "zero sparse channel changed the embedding\n";
    return 1;
  }
  return 0;
}

}  // namespace sparsedc::cli
