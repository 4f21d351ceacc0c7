#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sparsedc/raster.hpp"
#include "sparsedc/sparse_depth.hpp"

namespace sparsedc {

inline constexpr double kDefaultMaxGtDepth = 80.0;

struct FrameEval {
  double mae = 0.0;   ///< meters
  double rmse = 0.0;  ///< meters
  std::size_t n_gt = 0;
};

/// Errors over pixels valid in both maps; GT beyond max_gt_depth is ignored.
/// Throws InvalidInput on shape mismatch or empty overlap.
FrameEval frame_metrics(const DepthMap& pred, const DepthMap& gt, double max_gt_depth = kDefaultMaxGtDepth);

enum class FitDomain { Metric, Inverse };

std::string_view to_string(FitDomain domain);
FitDomain fit_domain_from_string(std::string_view s);

/// t = a * p + b in the fit domain. In the inverse domain the prediction is
/// taken as disparity and the targets are 1 / depth.
struct AffineFit {
  double a = 1.0;
  double b = 0.0;
  double residual_rms = 0.0;  ///< in fit-domain units
  std::size_t n_used = 0;
  FitDomain domain = FitDomain::Inverse;
};

/// Closed-form least squares over the measurements that fall on finite
/// prediction pixels. Throws FitError with fewer than two usable points or
/// when all used predictions are equal.
AffineFit ls_affine_fit(const Grid<double>& affine_pred, const SparseMeasurementSet& measurements,
                        FitDomain domain = FitDomain::Inverse);

/// Metric depth from the aligned prediction; non-positive or non-finite results are invalid.
DepthMap apply_affine(const Grid<double>& affine_pred, const AffineFit& fit);

struct RankTable {
  std::vector<std::string> methods;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  ///< [method][column]
  std::vector<double> avg_rank;
};

/// Per column rank 1 is the smallest value; exact ties share the mean of their
/// positions. Rows come back sorted by avg_rank, worst first and best last;
/// equal averages keep input order.
RankTable rank_aggregate(const std::vector<std::string>& methods, const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& values);

/// CSV in: "method,<col>,...". CSV out adds a trailing avg_rank column.
RankTable read_rank_csv(const std::filesystem::path& path);
RankTable parse_rank_csv(const std::string& text, const std::string& source = "<csv>");
std::string rank_table_to_csv(const RankTable& table);

struct FrameRecord {
  std::size_t index = 0;
  FrameEval eval;
};

struct DatasetEval {
  std::string dataset;
  double mae_mean = 0.0;
  double rmse_mean = 0.0;
  std::vector<FrameRecord> frames;
};

struct FramePair {
  DepthMap pred;
  DepthMap gt;
};

/// Unweighted mean over frames. Frame errors are rethrown naming the frame index.
DatasetEval dataset_eval(const std::vector<FramePair>& frames, double max_gt_depth = kDefaultMaxGtDepth,
                         unsigned threads = 1);

/// Pairs every *.pfm in gt_dir (sorted by name) with the same file name in pred_dir.
DatasetEval evaluate_directories(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                                 double max_gt_depth = kDefaultMaxGtDepth, unsigned threads = 1);

/// {dataset, n_frames, mae_mean, rmse_mean, frames: [{index, mae, rmse, n_gt}]}
std::string eval_report_json(const DatasetEval& eval);

}  // namespace sparsedc
