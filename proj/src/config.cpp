#include "edh/config.hpp"
#include "edh/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>

namespace edh {
namespace {

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    auto item = trim(s.substr(start, pos - start));
    if (!item.empty())
      out.push_back(item);
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view s)
{
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InvalidParams("not a number: '" + std::string(s) + "'");
  return v;
}

template <typename Int>
Int to_int(std::string_view s)
{
  s = trim(s);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InvalidParams("not an integer: '" + std::string(s) + "'");
  return v;
}

std::map<std::string_view, std::string_view> parse_kv(std::string_view args)
{
  std::map<std::string_view, std::string_view> kv;
  for (auto item : split(args, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw InvalidParams("expected key=value in scene spec, got '" +
                          std::string(item) + "'");
    kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return kv;
}

}  // namespace

Method parse_method(std::string_view name)
{
  if (name == "oedh") return Method::oedh;
  if (name == "pedh") return Method::pedh;
  if (name == "hedh") return Method::hedh;
  if (name == "ewh32") return Method::ewh32;
  if (name == "ewh1024") return Method::ewh1024;
  throw InvalidParams("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method method)
{
  switch (method) {
    case Method::oedh: return "oedh";
    case Method::pedh: return "pedh";
    case Method::hedh: return "hedh";
    case Method::ewh32: return "ewh32";
    case Method::ewh1024: return "ewh1024";
  }
  return "?";
}

bool is_edh(Method method)
{
  return method == Method::oedh || method == Method::pedh || method == Method::hedh;
}

bool applies(Method method, EstimatorKind estimator)
{
  return is_edh(method) ? estimator != EstimatorKind::ewh_peak
                        : estimator == EstimatorKind::ewh_peak;
}

std::vector<PhotonPair> default_photon_pairs()
{
  return {{1.0, 1.0}, {1.0, 2.0}, {1.0, 5.0}, {1.0, 10.0},
          {0.5, 0.5}, {0.5, 1.0}, {0.5, 2.5}, {0.5, 5.0}};
}

std::vector<double> parse_double_list(std::string_view text)
{
  std::vector<double> out;
  for (auto item : split(text, ','))
    out.push_back(to_double(item));
  return out;
}

void ExperimentConfig::validate() const
{
  sim.validate();
  step.validate(sim.cycles);
  if (methods.empty())
    throw InvalidParams("at least one method is required");
  if (estimators.empty())
    throw InvalidParams("at least one estimator is required");
  if (n_monte_carlo < 1)
    throw InvalidParams("n_monte_carlo must be at least 1");
  if (pairs.empty())
    throw InvalidParams("at least one photon-level pair is required");
  for (const auto& p : pairs)
    PixelConfig{0.0, p.sig, p.bkg}.validate();
  if (q < 2)
    throw InvalidParams("q must be at least 2");
  if (!std::has_single_bit(q) &&
      std::find(methods.begin(), methods.end(), Method::hedh) != methods.end())
    throw QNotPowerOfTwo("HEDH needs q to be a power of two, got " + std::to_string(q));
  if (!(fixed_step > 0.0))
    throw InvalidParams("fixed step must be positive");
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value)
{
  key = trim(key);
  value = trim(value);
  if (key == "seed") cfg.global_seed = to_int<std::uint64_t>(value);
  else if (key == "scene") cfg.scene = std::string(value);
  else if (key == "output") cfg.output_dir = std::string(value);
  else if (key == "sim.bins") cfg.sim.num_bins = to_int<std::uint32_t>(value);
  else if (key == "sim.period") cfg.sim.period_s = to_double(value);
  else if (key == "sim.fwhm") cfg.sim.fwhm_s = to_double(value);
  else if (key == "sim.cycles") cfg.sim.cycles = to_int<std::uint32_t>(value);
  else if (key == "sim.c") cfg.sim.light_speed = to_double(value);
  else if (key == "photons.pairs") {
    cfg.pairs.clear();
    for (auto item : split(value, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string_view::npos)
        throw InvalidParams("photon pair must be sig:bkg, got '" + std::string(item) + "'");
      cfg.pairs.push_back({to_double(item.substr(0, colon)), to_double(item.substr(colon + 1))});
    }
  }
  else if (key == "step.k_pct") cfg.step.k_pct = to_double(value);
  else if (key == "step.gamma") cfg.step.gamma = to_double(value);
  else if (key == "step.beta1") cfg.step.beta1 = to_double(value);
  else if (key == "step.beta2") cfg.step.beta2 = to_double(value);
  else if (key == "step.decay_freeze_cycle") cfg.step.decay_freeze_cycle = to_int<std::uint32_t>(value);
  else if (key == "step.clip") {
    if (value == "off" || value == "none")
      cfg.step.clip.reset();
    else
      cfg.step.clip = to_double(value);
  }
  else if (key == "edh.q") cfg.q = to_int<std::size_t>(value);
  else if (key == "edh.fixed_step") cfg.fixed_step = to_double(value);
  else if (key == "estimate.knots") cfg.knots = parse_knot_placement(value);
  else if (key == "methods") {
    cfg.methods.clear();
    for (auto m : split(value, ','))
      cfg.methods.push_back(parse_method(m));
  }
  else if (key == "estimators") {
    cfg.estimators.clear();
    for (auto e : split(value, ','))
      cfg.estimators.push_back(parse_estimator(e));
  }
  else if (key == "experiment.runs") cfg.n_monte_carlo = to_int<std::uint32_t>(value);
  else if (key == "experiment.inliers") cfg.inlier_thresholds = parse_double_list(value);
  else if (key == "experiment.inlier_mode") cfg.inlier_mode = parse_inlier_mode(value);
  else if (key == "experiment.mode") {
    if (value == "standard") cfg.mode = ExperimentMode::standard;
    else if (value == "median_tracking") cfg.mode = ExperimentMode::median_tracking;
    else throw InvalidParams("unknown experiment mode '" + std::string(value) + "'");
  }
  else
    throw InvalidParams("unknown config key '" + std::string(key) + "'");
}

void apply_env_overrides(ExperimentConfig& cfg)
{
  if (const char* seed = std::getenv("EDH_SEED"); seed && *seed)
    cfg.global_seed = to_int<std::uint64_t>(seed);
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw FileNotFound(path.string());
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos)
      text = text.substr(0, hash);
    text = trim(text);
    if (text.empty())
      continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected 'key = value'", line_no);
    try {
      apply_setting(cfg, text.substr(0, eq), text.substr(eq + 1));
    } catch (const InvalidParams& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  apply_env_overrides(cfg);
  return cfg;
}

Scene make_scene(std::string_view spec, double z_max, double phi_sig, double phi_bkg)
{
  const auto colon = spec.find(':');
  const auto kind = trim(spec.substr(0, colon));
  const auto rest = colon == std::string_view::npos ? std::string_view{}
                                                    : spec.substr(colon + 1);
  if (kind == "csv" || kind == "raw") {
    Scene s;
    s.depth_map = load_depth_map(std::filesystem::path(std::string(trim(rest))),
                                 kind == "csv" ? DepthFormat::csv : DepthFormat::raw_f32,
                                 z_max);
    s.pixel_configs = {PixelConfig{0.0, phi_sig, phi_bkg}};
    return s;
  }

  SceneParams p;
  p.phi_sig_total = phi_sig;
  p.phi_bkg_total = phi_bkg;
  const auto kv = parse_kv(rest);
  auto get = [&kv](std::string_view k) -> const std::string_view* {
    const auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  std::size_t used = 0;
  auto num = [&](std::string_view k, double& dst) {
    if (const auto* v = get(k)) { dst = to_double(*v); ++used; }
  };
  auto uint = [&](std::string_view k, std::uint32_t& dst) {
    if (const auto* v = get(k)) { dst = to_int<std::uint32_t>(*v); ++used; }
  };

  if (kind == "constant") {
    p.kind = SceneKind::constant;
    num("z", p.z);
    uint("w", p.width);
    uint("h", p.height);
  } else if (kind == "staircase") {
    p.kind = SceneKind::staircase;
    uint("n", p.n_steps);
    num("zmin", p.z_min);
    num("zmax", p.z_far);
    uint("rows", p.height);
    uint("cols", p.cols_per_step);
  } else if (kind == "two_plane") {
    p.kind = SceneKind::two_plane;
    p.width = 2;
    num("z1", p.z1);
    num("z2", p.z2);
    uint("w", p.width);
    uint("h", p.height);
  } else {
    throw InvalidParams("unknown scene kind '" + std::string(kind) + "'");
  }
  if (used != kv.size())
    throw InvalidParams("unknown key in scene spec '" + std::string(spec) + "'");
  return synth_scene(p, z_max);
}

}  // namespace edh
