#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <thread>

#include <quadmath.h>

#include "losses_impl.hpp"
#include "sparsedc/error.hpp"
#include "sparsedc/parallel.hpp"

namespace sparsedc {

namespace detail {

namespace {

// log for binary128 by table reduction: x = m 2^k, m in [1, 2), c_j = 1 + j/128,
// log m = log c_j + 2 atanh((m - c_j)/(m + c_j)). |s| < 2^-8 so eight odd
// terms of the atanh series reach full precision. About twice as fast as logq.
struct LogTable {
  static constexpr int kSize = 128;
  std::array<__float128, kSize + 1> log_c{};
  std::array<__float128, 8> inv_odd{};
  __float128 ln2 = 0;

  LogTable() {
    for (int j = 0; j <= kSize; ++j) log_c[j] = logq(1 + static_cast<__float128>(j) / kSize);
    for (int n = 0; n < 8; ++n) inv_odd[n] = 1 / static_cast<__float128>(2 * n + 1);
    ln2 = logq(static_cast<__float128>(2));
  }
};

const LogTable& log_table() {
  static const LogTable table;
  return table;
}

}  // namespace

__float128 scalar_abs(__float128 x) { return x < 0 ? -x : x; }

__float128 scalar_log(__float128 x) {
  if (!(x > 0)) return logq(x);
  const LogTable& t = log_table();
  int k = 0;
  __float128 m = frexpq(x, &k) * 2;  // [1, 2)
  k -= 1;
  int j = static_cast<int>((static_cast<double>(m) - 1.0) * LogTable::kSize);
  j = std::clamp(j, 0, LogTable::kSize - 1);
  const __float128 c = 1 + static_cast<__float128>(j) / LogTable::kSize;
  const __float128 s = (m - c) / (m + c);
  const __float128 s2 = s * s;
  __float128 p = t.inv_odd[7];
  for (int n = 6; n >= 0; --n) p = p * s2 + t.inv_odd[n];
  return t.log_c[j] + 2 * s * p + static_cast<__float128>(k) * t.ln2;
}

}  // namespace detail

namespace {

using Quad = __float128;

class QuadLoss {
 public:
  QuadLoss(LossKind kind, const Grid<double>& gt, const Mask& mask, const LossConfig& cfg, std::span<const Quad> base)
      : kind_(kind), cfg_(cfg), base_(base) {
    if (kind != LossKind::GradientMatching) {
      si_ = std::make_unique<detail::ScaleInvariantTerm<Quad>>(gt, mask, cfg.lambda_si);
      si_sums_ = si_->sums(base);
    }
    if (kind == LossKind::GradientMatching || (kind == LossKind::Total && cfg.lambda_grad != 0.0)) {
      grad_ = std::make_unique<detail::GradientMatchingTerm<Quad>>(gt, mask, cfg.grad_scales);
    }
  }

  // Loss at `x`, which equals the base prediction except at pixel i.
  Quad value(std::span<const Quad> x, std::size_t i, Quad log_gt_i) const {
    Quad v = 0;
    if (si_) v += si_->value_replacing(si_sums_, base_[i], x[i], log_gt_i);
    if (grad_) {
      const Quad g = grad_->value(x);
      v += kind_ == LossKind::Total ? static_cast<Quad>(cfg_.lambda_grad) * g : g;
    }
    return v;
  }

 private:
  LossKind kind_;
  LossConfig cfg_;
  std::span<const Quad> base_;
  std::unique_ptr<detail::ScaleInvariantTerm<Quad>> si_;
  std::pair<Quad, Quad> si_sums_{};
  std::unique_ptr<detail::GradientMatchingTerm<Quad>> grad_;
};

}  // namespace

FiniteDiffResult finite_diff_check(LossKind kind, const Grid<double>& pred, const Grid<double>& gt, const Mask& mask,
                                   const LossConfig& cfg, double epsilon, unsigned threads) {
  if (!(epsilon > 0.0)) throw InvalidInput("finite_diff_check: epsilon must be positive");
  cfg.validate();

  LossReport analytic;
  switch (kind) {
    case LossKind::ScaleInvariant: analytic = si_loss(pred, gt, mask, cfg.lambda_si); break;
    case LossKind::GradientMatching: analytic = grad_matching_loss(pred, gt, mask, cfg.grad_scales); break;
    case LossKind::Total: analytic = total_loss(pred, gt, mask, cfg); break;
  }

  FiniteDiffResult result;
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      valid.push_back(i);
    } else if (analytic.gradient[i] != 0.0) {
      result.masked_gradient_zero = false;
    }
  }

  std::vector<Quad> base(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) base[i] = static_cast<Quad>(pred[i]);
  const QuadLoss loss(kind, gt, mask, cfg, base);
  const Quad eps = static_cast<Quad>(epsilon);

  std::vector<double> rel(valid.size(), 0.0);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads == 0 ? std::thread::hardware_concurrency() : threads,
                                                           static_cast<unsigned>(std::max<std::size_t>(1, valid.size()))));
  const std::size_t chunk = (valid.size() + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t w) {
    std::vector<Quad> x = base;
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(valid.size(), begin + chunk);
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t i = valid[k];
      const Quad log_gt = detail::scalar_log(static_cast<Quad>(gt[i]));
      x[i] = base[i] + eps;
      const Quad plus = loss.value(x, i, log_gt);
      x[i] = base[i] - eps;
      const Quad minus = loss.value(x, i, log_gt);
      x[i] = base[i];
      const double numeric = static_cast<double>((plus - minus) / (2 * eps));
      const double a = analytic.gradient[i];
      rel[k] = std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-12});
    }
  });

  result.n_checked = valid.size();
  for (std::size_t k = 0; k < rel.size(); ++k) {
    if (rel[k] > result.max_rel_error) {
      result.max_rel_error = rel[k];
      result.worst_index = valid[k];
    }
  }
  if (!result.masked_gradient_zero) result.max_rel_error = std::numeric_limits<double>::infinity();
  return result;
}

}  // namespace sparsedc
