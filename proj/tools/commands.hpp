#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sparsedc/run_config.hpp"

namespace sparsedc::cli {

struct Globals {
  RunConfig config;
  unsigned threads = 1;
};

struct GenDataArgs {
  std::string mesh;
  std::string out_dir;
  std::optional<std::uint64_t> frames;
  bool procedural = false;
};

struct SampleSparseArgs {
  std::string image;
  std::string depth;
  std::string camera;  ///< optional camera JSON; config intrinsics otherwise
  std::string out_csv;
  std::string out_channel;
  std::uint64_t frame = 0;
};

struct EncodeArgs {
  double depth = 0.0;
  std::optional<double> focal;
  bool decode = false;
};

struct EvalArgs {
  std::string pred_dir;
  std::string gt_dir;
  std::string lift_dir;  ///< per-frame measurement CSVs; predictions are then affine
  std::string out;
};

struct RankArgs {
  std::string values;
  std::string out;
};

struct LossCheckArgs {
  int size = 32;
  double epsilon = 1e-9;
  double valid_fraction = 0.8;
};

struct EmbedCheckArgs {
  std::string weights;
  std::string image;
  std::string measurements;
  std::uint64_t draws = 4;
};

int gen_data(const Globals& g, const GenDataArgs& a);
int sample_sparse(const Globals& g, const SampleSparseArgs& a);
int encode(const Globals& g, const EncodeArgs& a);
int eval(const Globals& g, const EvalArgs& a);
int rank(const Globals& g, const RankArgs& a);
int losscheck(const Globals& g, const LossCheckArgs& a);
int embed_check(const Globals& g, const EmbedCheckArgs& a);

}  // namespace sparsedc::cli
