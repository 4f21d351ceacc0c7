#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sparsedc/camera.hpp"
#include "sparsedc/eval.hpp"
#include "sparsedc/losses.hpp"
#include "sparsedc/patch_embedding.hpp"
#include "sparsedc/pose_sampler.hpp"
#include "sparsedc/sparse_depth.hpp"

namespace sparsedc {

struct EmbedConfig {
  int embed_dim = 32;
  int patch = 14;
  double init_scale = kDefaultInitScale;

  void validate() const;
};

struct EvalConfig {
  FitDomain fit_domain = FitDomain::Inverse;
  double max_gt_depth = kDefaultMaxGtDepth;

  void validate() const;
};

struct PathsConfig {
  std::string mesh;
  std::string out_dir;
  std::string image;
  std::string depth_gt;
  std::string pred_dir;
  std::string gt_dir;
  std::string values;
  std::string weights;
};

/// Everything a CLI run needs. JSON sections: seed, transform, sampler,
/// pose_sampler, loss, camera, embed, eval, paths. Every key is optional;
/// unknown keys are a ParseError. The top-level seed feeds every component.
struct RunConfig {
  std::uint64_t seed = 0;
  TransformConfig transform;
  SamplerConfig sampler;
  PoseSamplerConfig pose_sampler;
  LossConfig loss;
  CameraIntrinsics camera{500.0, 500.0, 320.0, 240.0, 640, 480};
  EmbedConfig embed;
  EvalConfig eval;
  PathsConfig paths;

  void set_seed(std::uint64_t s);
  void validate() const;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text, const std::string& source = "<config>");
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace sparsedc
