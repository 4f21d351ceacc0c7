#include "sparsedc/run_config.hpp"

#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

#include "sparsedc/error.hpp"
#include "sparsedc/io.hpp"

namespace sparsedc {

void EmbedConfig::validate() const {
  if (embed_dim < 1) throw InvalidInput("embed: embed_dim must be >= 1");
  if (patch < 1) throw InvalidInput("embed: patch must be >= 1");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw InvalidInput("embed: init_scale must be >= 0");
}

void EvalConfig::validate() const {
  if (!(max_gt_depth > 0.0)) throw InvalidInput("eval: max_gt_depth must be positive");
}

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  sampler.seed = s;
  pose_sampler.seed = s;
}

void RunConfig::validate() const {
  transform.validate();
  sampler.validate();
  pose_sampler.validate();
  loss.validate();
  camera.validate();
  embed.validate();
  eval.validate();
}

namespace {

using Json = nlohmann::json;
using Setter = std::function<void(const Json&)>;

void read_section(const Json& j, const std::string& section, const std::map<std::string, Setter>& fields) {
  if (!j.is_object()) throw InvalidInput("'" + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw InvalidInput("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
    }
    it->second(value);
  }
}

template <typename T>
Setter bind(T& target) {
  return [&target](const Json& v) { target = v.get<T>(); };
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text, const std::string& source) {
  RunConfig cfg;
  try {
    const Json j = Json::parse(text);
    std::uint64_t seed = 0;
    std::string domain = std::string(to_string(cfg.eval.fit_domain));
    read_section(j, "",
                 {
                     {"seed", bind(seed)},
                     {"transform",
                      [&](const Json& s) {
                        read_section(s, "transform",
                                     {{"f_c", bind(cfg.transform.f_c)},
                                      {"d_min", bind(cfg.transform.d_min)},
                                      {"d_max", bind(cfg.transform.d_max)}});
                      }},
                     {"sampler",
                      [&](const Json& s) {
                        auto& c = cfg.sampler;
                        read_section(s, "sampler",
                                     {{"n_min", bind(c.n_min)},
                                      {"n_max", bind(c.n_max)},
                                      {"p_noise", bind(c.p_noise)},
                                      {"n_low", bind(c.n_low)},
                                      {"n_high", bind(c.n_high)},
                                      {"corner_quality", bind(c.corner_quality)},
                                      {"corner_min_dist", bind(c.corner_min_dist)},
                                      {"corner_max_candidates", bind(c.corner_max_candidates)}});
                      }},
                     {"pose_sampler",
                      [&](const Json& s) {
                        auto& c = cfg.pose_sampler;
                        read_section(s, "pose_sampler",
                                     {{"n_frames", bind(c.n_frames)},
                                      {"z_min", bind(c.z_min)},
                                      {"z_max", bind(c.z_max)},
                                      {"theta_xy_deg", bind(c.theta_xy_deg)},
                                      {"horizontal_margin", bind(c.horizontal_margin)}});
                      }},
                     {"loss",
                      [&](const Json& s) {
                        read_section(s, "loss",
                                     {{"lambda_si", bind(cfg.loss.lambda_si)},
                                      {"lambda_grad", bind(cfg.loss.lambda_grad)},
                                      {"grad_scales", bind(cfg.loss.grad_scales)}});
                      }},
                     {"camera",
                      [&](const Json& s) {
                        auto& c = cfg.camera;
                        read_section(s, "camera",
                                     {{"fx", bind(c.fx)},
                                      {"fy", bind(c.fy)},
                                      {"cx", bind(c.cx)},
                                      {"cy", bind(c.cy)},
                                      {"width", bind(c.width)},
                                      {"height", bind(c.height)}});
                      }},
                     {"embed",
                      [&](const Json& s) {
                        read_section(s, "embed",
                                     {{"embed_dim", bind(cfg.embed.embed_dim)},
                                      {"patch", bind(cfg.embed.patch)},
                                      {"init_scale", bind(cfg.embed.init_scale)}});
                      }},
                     {"eval",
                      [&](const Json& s) {
                        read_section(s, "eval",
                                     {{"fit_domain", bind(domain)}, {"max_gt_depth", bind(cfg.eval.max_gt_depth)}});
                      }},
                     {"paths",
                      [&](const Json& s) {
                        auto& p = cfg.paths;
                        read_section(s, "paths",
                                     {{"mesh", bind(p.mesh)},
                                      {"out_dir", bind(p.out_dir)},
                                      {"image", bind(p.image)},
                                      {"depth_gt", bind(p.depth_gt)},
                                      {"pred_dir", bind(p.pred_dir)},
                                      {"gt_dir", bind(p.gt_dir)},
                                      {"values", bind(p.values)},
                                      {"weights", bind(p.weights)}});
                      }},
                 });
    cfg.eval.fit_domain = fit_domain_from_string(domain);
    cfg.set_seed(seed);
  } catch (const Json::exception& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw ParseError(source + ": " + e.what());
  }
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(source + ": " + e.what());
  }
  return cfg;
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["transform"] = {{"f_c", transform.f_c}, {"d_min", transform.d_min}, {"d_max", transform.d_max}};
  j["sampler"] = {{"n_min", sampler.n_min},
                  {"n_max", sampler.n_max},
                  {"p_noise", sampler.p_noise},
                  {"n_low", sampler.n_low},
                  {"n_high", sampler.n_high},
                  {"corner_quality", sampler.corner_quality},
                  {"corner_min_dist", sampler.corner_min_dist},
                  {"corner_max_candidates", sampler.corner_max_candidates}};
  j["pose_sampler"] = {{"n_frames", pose_sampler.n_frames},
                       {"z_min", pose_sampler.z_min},
                       {"z_max", pose_sampler.z_max},
                       {"theta_xy_deg", pose_sampler.theta_xy_deg},
                       {"horizontal_margin", pose_sampler.horizontal_margin}};
  j["loss"] = {{"lambda_si", loss.lambda_si}, {"lambda_grad", loss.lambda_grad}, {"grad_scales", loss.grad_scales}};
  j["camera"] = {{"fx", camera.fx}, {"fy", camera.fy},       {"cx", camera.cx},
                 {"cy", camera.cy}, {"width", camera.width}, {"height", camera.height}};
  j["embed"] = {{"embed_dim", embed.embed_dim}, {"patch", embed.patch}, {"init_scale", embed.init_scale}};
  j["eval"] = {{"fit_domain", std::string(to_string(eval.fit_domain))}, {"max_gt_depth", eval.max_gt_depth}};
  j["paths"] = {{"mesh", paths.mesh},         {"out_dir", paths.out_dir}, {"image", paths.image},
                {"depth_gt", paths.depth_gt}, {"pred_dir", paths.pred_dir}, {"gt_dir", paths.gt_dir},
                {"values", paths.values},     {"weights", paths.weights}};
  return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return RunConfig::from_json(read_text_file(path), path.string());
}

}  // namespace sparsedc
