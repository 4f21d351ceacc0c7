#include "sparsedc/dataset.hpp"

#include <cstdio>

#include <json.hpp>

#include "sparsedc/error.hpp"
#include "sparsedc/io.hpp"
#include "sparsedc/parallel.hpp"
#include "sparsedc/renderer.hpp"

namespace sparsedc {

namespace {

std::string frame_name(const char* prefix, std::size_t index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05zu.%s", prefix, index, ext);
  return buf;
}

}  // namespace

std::string DatasetManifest::to_json() const {
  nlohmann::ordered_json j;
  j["scene"] = scene;
  j["seed"] = seed;
  j["n_frames"] = n_frames;
  j["intrinsics"] = {{"fx", intrinsics.fx},     {"fy", intrinsics.fy},         {"cx", intrinsics.cx},
                     {"cy", intrinsics.cy},     {"width", intrinsics.width}, {"height", intrinsics.height}};
  j["config"] = {{"n_frames", config.n_frames},         {"z_min", config.z_min},
                 {"z_max", config.z_max},               {"theta_xy_deg", config.theta_xy_deg},
                 {"seed", config.seed},                 {"horizontal_margin", config.horizontal_margin}};
  auto frames_json = nlohmann::ordered_json::array();
  for (const auto& f : frames) frames_json.push_back({{"depth", f.depth}, {"pose", f.pose}, {"image", f.image}});
  j["frames"] = std::move(frames_json);
  return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(const std::string& text, const std::string& source) {
  try {
    const auto j = nlohmann::json::parse(text);
    DatasetManifest m;
    m.scene = j.at("scene").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n_frames = j.at("n_frames").get<std::uint64_t>();
    const auto& k = j.at("intrinsics");
    m.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(),  k.at("cx").get<double>(),
                    k.at("cy").get<double>(), k.at("width").get<int>(), k.at("height").get<int>()};
    if (j.contains("config")) {
      const auto& c = j.at("config");
      m.config.n_frames = c.at("n_frames").get<std::uint64_t>();
      m.config.z_min = c.at("z_min").get<double>();
      m.config.z_max = c.at("z_max").get<double>();
      m.config.theta_xy_deg = c.at("theta_xy_deg").get<double>();
      m.config.seed = c.at("seed").get<std::uint64_t>();
      m.config.horizontal_margin = c.at("horizontal_margin").get<double>();
    }
    for (const auto& f : j.at("frames")) {
      m.frames.push_back({f.at("depth").get<std::string>(), f.at("pose").get<std::string>(),
                          f.at("image").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
}

DatasetManifest generate_dataset(const TriangleMesh& mesh, const std::string& scene, const PoseSamplerConfig& cfg,
                                 const CameraIntrinsics& intr, const std::filesystem::path& out_dir,
                                 unsigned threads) {
  cfg.validate();
  intr.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const Bvh bvh = build_bvh(mesh);
  DatasetManifest manifest;
  manifest.scene = scene;
  manifest.seed = cfg.seed;
  manifest.n_frames = cfg.n_frames;
  manifest.intrinsics = intr;
  manifest.config = cfg;
  manifest.frames.resize(cfg.n_frames);

  parallel_for(cfg.n_frames, threads, [&](std::size_t i) {
    Rng rng(derive_seed(cfg.seed, Stream::PoseSampling, i));
    const PoseSample sample = sample_pose(cfg, bvh, mesh, rng);
    const RenderResult result = render(bvh, mesh, intr, sample.pose, 1);
    FrameFiles files{frame_name("depth", i, "pfm"), frame_name("pose", i, "json"), frame_name("image", i, "pgm")};
    write_depth(out_dir / files.depth, result.depth);
    write_camera(out_dir / files.pose, CameraFile{intr, sample.pose});
    write_pgm(out_dir / files.image, shade_lambertian(mesh, result, sample.pose, intr));
    manifest.frames[i] = std::move(files);
  });

  write_text_file(out_dir / kManifestName, manifest.to_json());
  return manifest;
}

DatasetManifest generate_dataset(const std::filesystem::path& mesh_path, const PoseSamplerConfig& cfg,
                                 const CameraIntrinsics& intr, const std::filesystem::path& out_dir,
                                 unsigned threads) {
  const TriangleMesh mesh = load_obj(mesh_path);
  return generate_dataset(mesh, mesh_path.stem().string(), cfg, intr, out_dir, threads);
}

}  // namespace sparsedc
