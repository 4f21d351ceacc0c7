#include "sparsedc/losses.hpp"

#include <cmath>
#include <string>

#include "losses_impl.hpp"
#include "sparsedc/error.hpp"

namespace sparsedc {

void LossConfig::validate() const {
  if (!(lambda_si >= 0.0 && lambda_si <= 1.0)) throw InvalidInput("loss: lambda_si must lie in [0, 1]");
  if (!(lambda_grad >= 0.0)) throw InvalidInput("loss: lambda_grad must be >= 0");
  if (grad_scales < 1) throw InvalidInput("loss: grad_scales must be >= 1");
}

namespace detail {

void check_loss_inputs(const Grid<double>& pred, const Grid<double>& gt, const Mask& mask) {
  if (!pred.same_shape(gt) || !pred.same_shape(mask)) throw InvalidInput("loss: pred, gt and mask shapes differ");
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ++n;
    if (!(pred[i] > 0.0) || !std::isfinite(pred[i])) {
      throw InvalidInput("loss: prediction not positive at valid pixel " + std::to_string(i));
    }
    if (!(gt[i] > 0.0) || !std::isfinite(gt[i])) {
      throw InvalidInput("loss: ground truth not positive at valid pixel " + std::to_string(i));
    }
  }
  if (n == 0) throw InvalidInput("loss: mask has no valid pixels");
}

}  // namespace detail

LossReport si_loss(const Grid<double>& pred, const Grid<double>& gt, const Mask& mask, double lambda_si) {
  detail::check_loss_inputs(pred, gt, mask);
  if (!(lambda_si >= 0.0 && lambda_si <= 1.0)) throw InvalidInput("si_loss: lambda_si must lie in [0, 1]");

  LossReport report;
  report.gradient = Grid<double>(pred.width(), pred.height(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ++report.n_valid;
    sum += std::log(pred[i]) - std::log(gt[i]);
  }
  const double n = static_cast<double>(report.n_valid);
  const double mean = sum / n;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const double r = std::log(pred[i]) - std::log(gt[i]);
    report.gradient[i] = (2.0 / n) * (r - lambda_si * mean) / pred[i];
  }
  report.value = detail::ScaleInvariantTerm<double>(gt, mask, lambda_si).value(pred.values());
  return report;
}

namespace {

struct PyramidLevel {
  int width = 0;
  int height = 0;
  std::vector<double> residual;
  std::vector<std::uint8_t> valid;
  std::vector<int> count;  ///< valid children pooled into each cell (level > 0)
};

}  // namespace

LossReport grad_matching_loss(const Grid<double>& pred, const Grid<double>& gt, const Mask& mask, int grad_scales) {
  detail::check_loss_inputs(pred, gt, mask);
  if (grad_scales < 1) throw InvalidInput("grad_matching_loss: grad_scales must be >= 1");

  std::vector<PyramidLevel> levels;
  {
    PyramidLevel base{pred.width(), pred.height(), std::vector<double>(pred.size(), 0.0),
                      std::vector<std::uint8_t>(mask.values().begin(), mask.values().end()), {}};
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (mask[i]) base.residual[i] = pred[i] - gt[i];
    }
    levels.push_back(std::move(base));
  }
  while (static_cast<int>(levels.size()) < grad_scales) {
    const PyramidLevel& fine = levels.back();
    const int cw = fine.width / 2;
    const int ch = fine.height / 2;
    if (cw == 0 || ch == 0) break;
    PyramidLevel coarse{cw, ch, std::vector<double>(static_cast<std::size_t>(cw) * ch, 0.0),
                        std::vector<std::uint8_t>(static_cast<std::size_t>(cw) * ch, 0),
                        std::vector<int>(static_cast<std::size_t>(cw) * ch, 0)};
    for (int y = 0; y < ch; ++y) {
      for (int x = 0; x < cw; ++x) {
        double acc = 0.0;
        int count = 0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t fi = static_cast<std::size_t>(2 * y + dy) * fine.width + (2 * x + dx);
            if (fine.valid[fi]) {
              acc += fine.residual[fi];
              ++count;
            }
          }
        }
        const std::size_t ci = static_cast<std::size_t>(y) * cw + x;
        coarse.count[ci] = count;
        if (count > 0) {
          coarse.residual[ci] = acc / count;
          coarse.valid[ci] = 1;
        }
      }
    }
    levels.push_back(std::move(coarse));
  }

  std::size_t n_valid = 0;
  for (auto m : mask.values()) n_valid += m ? 1 : 0;
  const double inv_n = 1.0 / static_cast<double>(n_valid);

  // Forward differences at every level; d|d|/dd = sign(d) with sign(0) = 0.
  double value = 0.0;
  std::vector<std::vector<double>> grads(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const PyramidLevel& lv = levels[k];
    auto& g = grads[k];
    g.assign(lv.residual.size(), 0.0);
    const auto term = [&](std::size_t a, std::size_t b) {
      const double d = lv.residual[b] - lv.residual[a];
      value += std::fabs(d);
      const double s = d > 0.0 ? inv_n : (d < 0.0 ? -inv_n : 0.0);
      g[b] += s;
      g[a] -= s;
    };
    for (int y = 0; y < lv.height; ++y) {
      for (int x = 0; x < lv.width; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * lv.width + x;
        if (!lv.valid[i]) continue;
        if (x + 1 < lv.width && lv.valid[i + 1]) term(i, i + 1);
        if (y + 1 < lv.height && lv.valid[i + lv.width]) term(i, i + lv.width);
      }
    }
  }

  // Pooling adjoint, coarse to fine.
  for (std::size_t k = levels.size() - 1; k > 0; --k) {
    const PyramidLevel& coarse = levels[k];
    const PyramidLevel& fine = levels[k - 1];
    for (int y = 0; y < coarse.height; ++y) {
      for (int x = 0; x < coarse.width; ++x) {
        const std::size_t ci = static_cast<std::size_t>(y) * coarse.width + x;
        if (!coarse.valid[ci]) continue;
        const double share = grads[k][ci] / coarse.count[ci];
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t fi = static_cast<std::size_t>(2 * y + dy) * fine.width + (2 * x + dx);
            if (fine.valid[fi]) grads[k - 1][fi] += share;
          }
        }
      }
    }
  }

  LossReport report;
  report.n_valid = n_valid;
  report.value = value * inv_n;
  report.gradient = Grid<double>(pred.width(), pred.height(), std::move(grads[0]));
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) report.gradient[i] = 0.0;
  }
  return report;
}

LossReport total_loss(const Grid<double>& pred, const Grid<double>& gt, const Mask& mask, const LossConfig& cfg) {
  cfg.validate();
  LossReport si = si_loss(pred, gt, mask, cfg.lambda_si);
  if (cfg.lambda_grad == 0.0) return si;
  const LossReport grad = grad_matching_loss(pred, gt, mask, cfg.grad_scales);
  si.value += cfg.lambda_grad * grad.value;
  for (std::size_t i = 0; i < si.gradient.size(); ++i) si.gradient[i] += cfg.lambda_grad * grad.gradient[i];
  return si;
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::ScaleInvariant: return "si";
    case LossKind::GradientMatching: return "grad";
    case LossKind::Total: return "total";
  }
  return "?";
}

LossInstance random_loss_instance(int width, int height, double valid_fraction, Rng& rng) {
  if (width < 1 || height < 1) throw InvalidInput("random_loss_instance: empty size");
  LossInstance inst{Grid<double>(width, height, 0.0), Grid<double>(width, height, 0.0), Mask(width, height, 0)};
  std::size_t n_valid = 0;
  for (std::size_t i = 0; i < inst.gt.size(); ++i) {
    inst.gt[i] = rng.uniform(0.00625, 1.0);
    inst.pred[i] = inst.gt[i] * std::exp(rng.uniform(-0.5, 0.5));
    inst.mask[i] = rng.uniform() < valid_fraction ? 1 : 0;
    n_valid += inst.mask[i];
  }
  if (n_valid == 0) inst.mask[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(inst.mask.size()) - 1))] = 1;
  return inst;
}

Mask depth_range_mask(const DepthMap& gt, const TransformConfig& cfg) {
  Mask mask(gt.width(), gt.height(), 0);
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      const double d = gt.at(x, y);
      mask(x, y) = (gt.valid(x, y) && d >= cfg.d_min && d <= cfg.d_max) ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace sparsedc
