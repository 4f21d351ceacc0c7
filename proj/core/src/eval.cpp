#include "sparsedc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "sparsedc/error.hpp"
#include "sparsedc/io.hpp"
#include "sparsedc/parallel.hpp"
#include "text_util.hpp"

namespace sparsedc {

FrameEval frame_metrics(const DepthMap& pred, const DepthMap& gt, double max_gt_depth) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw InvalidInput("frame_metrics: prediction and ground truth sizes differ");
  }
  double sum_abs = 0.0;
  double sum_sq = 0.0;
  FrameEval out;
  const auto& p = pred.raster();
  const auto& g = gt.raster();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!DepthMap::is_valid_depth(g[i]) || !DepthMap::is_valid_depth(p[i])) continue;
    if (g[i] > max_gt_depth) continue;
    const double e = static_cast<double>(p[i]) - static_cast<double>(g[i]);
    sum_abs += std::fabs(e);
    sum_sq += e * e;
    ++out.n_gt;
  }
  if (out.n_gt == 0) throw InvalidInput("frame_metrics: no pixel is valid in both prediction and ground truth");
  const double n = static_cast<double>(out.n_gt);
  out.mae = sum_abs / n;
  out.rmse = std::sqrt(sum_sq / n);
  // sqrt rounding can put rmse an ulp under mae when every error is equal
  out.rmse = std::max(out.rmse, out.mae);
  return out;
}

std::string_view to_string(FitDomain domain) { return domain == FitDomain::Metric ? "metric" : "inverse"; }

FitDomain fit_domain_from_string(std::string_view s) {
  if (s == "metric") return FitDomain::Metric;
  if (s == "inverse") return FitDomain::Inverse;
  throw InvalidInput("unknown fit domain '" + std::string(s) + "' (expected metric or inverse)");
}

AffineFit ls_affine_fit(const Grid<double>& affine_pred, const SparseMeasurementSet& measurements, FitDomain domain) {
  std::vector<double> p;
  std::vector<double> t;
  for (const auto& m : measurements) {
    if (!affine_pred.contains(m.u, m.v)) continue;
    const double pv = affine_pred(m.u, m.v);
    if (!std::isfinite(pv) || !(m.depth > 0.0) || !std::isfinite(m.depth)) continue;
    p.push_back(pv);
    t.push_back(domain == FitDomain::Inverse ? 1.0 / m.depth : m.depth);
  }
  if (p.size() < 2) {
    throw FitError("ls_affine_fit: need at least 2 usable measurements, have " + std::to_string(p.size()));
  }
  const double n = static_cast<double>(p.size());
  const double p_mean = std::accumulate(p.begin(), p.end(), 0.0) / n;
  const double t_mean = std::accumulate(t.begin(), t.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sxx += (p[i] - p_mean) * (p[i] - p_mean);
    sxy += (p[i] - p_mean) * (t[i] - t_mean);
  }
  if (std::all_of(p.begin(), p.end(), [&](double v) { return v == p.front(); }) || !(sxx > 0.0)) {
    throw FitError("ls_affine_fit: all predictions at the measurements are equal");
  }
  AffineFit fit;
  fit.domain = domain;
  fit.n_used = p.size();
  fit.a = sxy / sxx;
  fit.b = t_mean - fit.a * p_mean;
  double ss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = fit.a * p[i] + fit.b - t[i];
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  if (!std::isfinite(fit.a) || !std::isfinite(fit.b)) throw FitError("ls_affine_fit: non-finite solution");
  return fit;
}

DepthMap apply_affine(const Grid<double>& affine_pred, const AffineFit& fit) {
  DepthMap out(affine_pred.width(), affine_pred.height());
  for (int y = 0; y < affine_pred.height(); ++y) {
    for (int x = 0; x < affine_pred.width(); ++x) {
      const double t = fit.a * affine_pred(x, y) + fit.b;
      const double d = fit.domain == FitDomain::Inverse ? 1.0 / t : t;
      if (std::isfinite(d) && d > 0.0) out.set(x, y, static_cast<float>(d));
    }
  }
  return out;
}

RankTable rank_aggregate(const std::vector<std::string>& methods, const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& values) {
  const std::size_t n = methods.size();
  if (n == 0) throw InvalidInput("rank_aggregate: no methods");
  if (columns.empty()) throw InvalidInput("rank_aggregate: no columns");
  if (values.size() != n) throw InvalidInput("rank_aggregate: value rows do not match method count");
  for (std::size_t m = 0; m < n; ++m) {
    if (values[m].size() != columns.size()) {
      throw InvalidInput("rank_aggregate: row '" + methods[m] + "' has " + std::to_string(values[m].size()) +
                         " values, expected " + std::to_string(columns.size()));
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (std::isnan(values[m][c])) {
        throw InvalidInput("rank_aggregate: NaN for '" + methods[m] + "' in column '" + columns[c] + "'");
      }
    }
  }

  std::vector<double> rank_sum(n, 0.0);
  std::vector<std::size_t> order(n);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a][c] < values[b][c]; });
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && values[order[j + 1]][c] == values[order[i]][c]) ++j;
      const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t k = i; k <= j; ++k) rank_sum[order[k]] += shared;
      i = j + 1;
    }
  }

  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<double> avg(n);
  for (std::size_t m = 0; m < n; ++m) avg[m] = rank_sum[m] / static_cast<double>(columns.size());
  std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) { return avg[a] > avg[b]; });

  RankTable table;
  table.columns = columns;
  for (std::size_t r : rows) {
    table.methods.push_back(methods[r]);
    table.values.push_back(values[r]);
    table.avg_rank.push_back(avg[r]);
  }
  return table;
}

RankTable parse_rank_csv(const std::string& text, const std::string& source) {
  const auto lines = detail::split_lines(text);
  std::vector<std::string> methods;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;
  bool have_header = false;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = detail::trim(lines[ln]);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = detail::split_csv(line);
    if (!have_header) {
      if (fields.size() < 2) throw ParseError(source, ln + 1, "header needs a method column and at least one value column");
      for (std::size_t i = 1; i < fields.size(); ++i) columns.emplace_back(detail::trim(fields[i]));
      if (columns.back() == "avg_rank") columns.pop_back();
      have_header = true;
      continue;
    }
    if (fields.size() < columns.size() + 1) {
      throw ParseError(source, ln + 1, "expected " + std::to_string(columns.size() + 1) + " fields");
    }
    methods.emplace_back(detail::trim(fields[0]));
    std::vector<double> row;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto v = detail::parse_double(detail::trim(fields[c + 1]));
      if (!v) throw ParseError(source, ln + 1, "not a number: '" + std::string(fields[c + 1]) + "'");
      row.push_back(*v);
    }
    values.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(source + ": empty rank table");
  RankTable table;
  table.methods = std::move(methods);
  table.columns = std::move(columns);
  table.values = std::move(values);
  return table;
}

RankTable read_rank_csv(const std::filesystem::path& path) { return parse_rank_csv(read_text_file(path), path.string()); }

std::string rank_table_to_csv(const RankTable& table) {
  if (table.avg_rank.size() != table.methods.size() || table.values.size() != table.methods.size()) {
    throw InvalidInput("rank_table_to_csv: table has not been ranked");
  }
  std::string out = "method";
  for (const auto& c : table.columns) out += "," + c;
  out += ",avg_rank\n";
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    out += table.methods[m];
    for (double v : table.values[m]) out += "," + detail::format_double(v);
    out += "," + detail::format_double(table.avg_rank[m]) + "\n";
  }
  return out;
}

DatasetEval dataset_eval(const std::vector<FramePair>& frames, double max_gt_depth, unsigned threads) {
  if (frames.empty()) throw InvalidInput("dataset_eval: no frames");
  std::vector<FrameEval> results(frames.size());
  parallel_for(frames.size(), threads, [&](std::size_t i) {
    try {
      results[i] = frame_metrics(frames[i].pred, frames[i].gt, max_gt_depth);
    } catch (const Error& e) {
      throw InvalidInput("frame " + std::to_string(i) + ": " + e.what());
    }
  });
  DatasetEval out;
  double mae = 0.0;
  double rmse = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.frames.push_back({i, results[i]});
    mae += results[i].mae;
    rmse += results[i].rmse;
  }
  out.mae_mean = mae / static_cast<double>(results.size());
  out.rmse_mean = rmse / static_cast<double>(results.size());
  return out;
}

DatasetEval evaluate_directories(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                                 double max_gt_depth, unsigned threads) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(gt_dir)) throw IoError("not a directory: " + gt_dir.string());
  if (!fs::is_directory(pred_dir)) throw IoError("not a directory: " + pred_dir.string());
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(gt_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pfm") names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw IoError("no .pfm files in " + gt_dir.string());
  std::vector<FramePair> frames;
  frames.reserve(names.size());
  for (const auto& name : names) {
    const fs::path pred_path = pred_dir / name;
    if (!fs::exists(pred_path)) throw IoError("missing prediction: " + pred_path.string());
    frames.push_back({read_depth(pred_path), read_depth(gt_dir / name)});
  }
  DatasetEval out = dataset_eval(frames, max_gt_depth, threads);
  out.dataset = gt_dir.filename().empty() ? gt_dir.parent_path().filename().string() : gt_dir.filename().string();
  return out;
}

std::string eval_report_json(const DatasetEval& eval) {
  nlohmann::ordered_json j;
  j["dataset"] = eval.dataset;
  j["n_frames"] = eval.frames.size();
  j["mae_mean"] = eval.mae_mean;
  j["rmse_mean"] = eval.rmse_mean;
  j["frames"] = nlohmann::ordered_json::array();
  for (const auto& f : eval.frames) {
    nlohmann::ordered_json fj;
    fj["index"] = f.index;
    fj["mae"] = f.eval.mae;
    fj["rmse"] = f.eval.rmse;
    fj["n_gt"] = f.eval.n_gt;
    j["frames"].push_back(std::move(fj));
  }
  return j.dump(2) + "\n";
}

}  // namespace sparsedc
