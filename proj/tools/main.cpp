#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "sparsedc/error.hpp"

int main(int argc, char** argv) {
  using namespace sparsedc;

  CLI::App app{"sparsedc: synthetic depth data, sparse depth simulation and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "0.1.0");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "64-bit seed; overrides the config");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();

  cli::GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "render a depth/pose/image dataset from a mesh");
  gen_cmd->add_option("--mesh", gen.mesh, "OBJ mesh (paths.mesh)");
  gen_cmd->add_option("--out", gen.out_dir, "output directory (paths.out_dir)");
  gen_cmd->add_option("--frames", gen.frames, "number of frames (pose_sampler.n_frames)");
  gen_cmd->add_flag("--procedural", gen.procedural, "render a seeded procedural terrain instead of --mesh");

  cli::SampleSparseArgs sample;
  auto* sample_cmd = app.add_subcommand("sample-sparse", "simulate sparse depth measurements for one frame");
  sample_cmd->add_option("--image", sample.image, "8-bit PGM image (paths.image)");
  sample_cmd->add_option("--depth", sample.depth, "ground-truth PFM depth (paths.depth_gt)");
  sample_cmd->add_option("--camera", sample.camera, "camera JSON with intrinsics");
  sample_cmd->add_option("--out-csv", sample.out_csv, "measurements CSV")->required();
  sample_cmd->add_option("--out-channel", sample.out_channel, "sparse depth channel PFM");
  sample_cmd->add_option("--frame", sample.frame, "frame index for seed derivation")->capture_default_str();

  cli::EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "canonical inverse-depth encoding of one value");
  enc_cmd->add_option("value", enc.depth, "metric depth, or an encoded value with --decode")->required();
  enc_cmd->add_option("--focal", enc.focal, "focal length in pixels (default: camera focal)");
  enc_cmd->add_flag("--decode", enc.decode, "decode an encoded value back to meters");

  cli::EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "MAE/RMSE of predicted depth maps against ground truth");
  eval_cmd->add_option("--pred", ev.pred_dir, "directory of predicted PFMs (paths.pred_dir)");
  eval_cmd->add_option("--gt", ev.gt_dir, "directory of ground-truth PFMs (paths.gt_dir)");
  eval_cmd->add_option("--lift", ev.lift_dir, "directory of <frame>.csv measurements; least-squares align predictions first");
  eval_cmd->add_option("--out", ev.out, "report JSON (default: stdout)");

  cli::RankArgs rk;
  auto* rank_cmd = app.add_subcommand("rank", "average ranks over a methods x columns table");
  rank_cmd->add_option("values", rk.values, "CSV: method,<col>,... (paths.values)");
  rank_cmd->add_option("--out", rk.out, "rank CSV (default: stdout)");

  cli::LossCheckArgs lc;
  auto* lc_cmd = app.add_subcommand("losscheck", "finite-difference check of the loss gradients");
  lc_cmd->add_option("--size", lc.size, "instance width and height")->capture_default_str()->check(CLI::Range(1, 256));
  lc_cmd->add_option("--epsilon", lc.epsilon, "central-difference step")->capture_default_str();
  lc_cmd->add_option("--valid-fraction", lc.valid_fraction, "fraction of valid pixels")->capture_default_str();

  cli::EmbedCheckArgs ec;
  auto* ec_cmd = app.add_subcommand("embed-check", "4-channel patch embedding versus the 3-channel original");
  ec_cmd->add_option("--weights", ec.weights, "3-channel float32 weights (paths.weights); random otherwise");
  ec_cmd->add_option("--image", ec.image, "PGM image; random images otherwise");
  ec_cmd->add_option("--measurements", ec.measurements, "measurement CSV for the 4th channel");
  ec_cmd->add_option("--draws", ec.draws, "random draws when no image is given")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cli::Globals g;
    if (!config_path.empty()) g.config = load_run_config(config_path);
    if (seed) g.config.set_seed(*seed);
    g.threads = threads;

    if (*gen_cmd) return cli::gen_data(g, gen);
    if (*sample_cmd) return cli::sample_sparse(g, sample);
    if (*enc_cmd) return cli::encode(g, enc);
    if (*eval_cmd) return cli::eval(g, ev);
    if (*rank_cmd) return cli::rank(g, rk);
    if (*lc_cmd) return cli::losscheck(g, lc);
    if (*ec_cmd) return cli::embed_check(g, ec);
  } catch (const sparsedc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
