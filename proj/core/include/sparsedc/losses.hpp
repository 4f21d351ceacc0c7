#pragma once

#include <cstddef>
#include <string_view>

#include "sparsedc/camera.hpp"
#include "sparsedc/raster.hpp"
#include "sparsedc/rng.hpp"

namespace sparsedc {

/// Training objective weights. Defaults: lambda_si = lambda_grad = 0.5 and the
/// customary four scales of the multi-scale gradient regularizer.
struct LossConfig {
  double lambda_si = 0.5;
  double lambda_grad = 0.5;
  int grad_scales = 4;

  void validate() const;
};

struct LossReport {
  double value = 0.0;
  Grid<double> gradient;  ///< d value / d pred; exactly 0 at masked pixels
  std::size_t n_valid = 0;
};

/// Scale-invariant log loss over the N valid pixels:
///   r_i = log pred_i - log gt_i
///   L   = (1/N) sum r_i^2 - (lambda/N^2) (sum r_i)^2
///   dL/dpred_i = (2/N) (r_i - lambda * mean(r)) / pred_i
/// Throws InvalidInput on shape mismatch, an empty mask or a nonpositive
/// value at a valid pixel.
LossReport si_loss(const Grid<double>& pred, const Grid<double>& gt, const Mask& mask, double lambda_si);

/// Multi-scale gradient matching on R = pred - gt:
///   L = (1/N) sum_{k < scales} sum_i |dx R^k_i| + |dy R^k_i|
/// where R^k is R average-pooled (2x2, valid pixels only) k times and each
/// forward difference needs both operands valid. Same preconditions as si_loss.
LossReport grad_matching_loss(const Grid<double>& pred, const Grid<double>& gt, const Mask& mask, int grad_scales);

/// si_loss + lambda_grad * grad_matching_loss (values and gradients).
LossReport total_loss(const Grid<double>& pred, const Grid<double>& gt, const Mask& mask, const LossConfig& cfg);

/// Mask of pixels whose metric ground truth lies in [d_min, d_max].
Mask depth_range_mask(const DepthMap& gt, const TransformConfig& cfg);

enum class LossKind { ScaleInvariant, GradientMatching, Total };

struct FiniteDiffResult {
  double max_rel_error = 0.0;  ///< over valid pixels; +inf if a masked gradient is nonzero
  std::size_t n_checked = 0;
  std::size_t worst_index = 0;
  bool masked_gradient_zero = true;
};

/// Central differences at every valid pixel versus the analytic gradient.
/// Relative error = |a - n| / max(|a|, |n|, 1e-12). The loss is re-evaluated
/// in IEEE binary128 so that rounding noise in the numeric derivative stays far
/// below the 1e-12 floor, including at pixels whose exact gradient is zero.
FiniteDiffResult finite_diff_check(LossKind kind, const Grid<double>& pred, const Grid<double>& gt,
                                   const Mask& mask, const LossConfig& cfg, double epsilon, unsigned threads = 1);

/// Step small enough that no perturbation crosses a kink of the piecewise-linear
/// gradient-matching term on random inputs.
inline constexpr double kDefaultFdEpsilon = 1e-9;

std::string_view to_string(LossKind kind);

/// Random positive pred/gt pair with a random validity mask (at least one valid pixel).
struct LossInstance {
  Grid<double> pred;
  Grid<double> gt;
  Mask mask;
};

LossInstance random_loss_instance(int width, int height, double valid_fraction, Rng& rng);

}  // namespace sparsedc
