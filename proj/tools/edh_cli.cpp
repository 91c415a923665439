// Command-line front end: simulation, histogramming, estimation, evaluation,
// experiments, parameter sweeps and feature export.

#include "edh/config.hpp"
#include "edh/errors.hpp"
#include "edh/estimator.hpp"
#include "edh/harness.hpp"
#include "edh/histogram.hpp"
#include "edh/metrics.hpp"
#include "edh/pipeline.hpp"
#include "edh/scene.hpp"
#include "edh/tensor_io.hpp"
#include "edh/transient.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

struct CommonArgs
{
  std::string config;
  std::string scene;
  std::string pair;
  int threads = 0;
};

void add_common(CLI::App* app, CommonArgs& args)
{
  app->add_option("--config", args.config, "key = value configuration file");
  app->add_option("--scene", args.scene, "scene spec, overrides the config");
  app->add_option("--pair", args.pair, "photon levels sig:bkg (default: first configured pair)");
  app->add_option("--threads", args.threads, "OpenMP threads (0 = default)");
}

edh::ExperimentConfig load(const CommonArgs& args)
{
  edh::ExperimentConfig cfg;
  if (!args.config.empty())
    cfg = edh::load_config(args.config);
  else
    edh::apply_env_overrides(cfg);
  if (!args.scene.empty())
    cfg.scene = args.scene;
  if (!args.pair.empty())
    edh::apply_setting(cfg, "photons.pairs", args.pair);
  return cfg;
}

edh::Scene scene_of(const edh::ExperimentConfig& cfg)
{
  const auto& p = cfg.pairs.front();
  return edh::make_scene(cfg.scene, cfg.sim.z_max(), p.sig, p.bkg);
}

std::vector<edh::PixelResult> run_scene(const edh::Scene& scene,
                                        const edh::PipelineOptions& opts,
                                        std::uint64_t seed, int threads)
{
  std::vector<edh::PixelJob> jobs;
  for (std::size_t i = 0; i < scene.num_pixels(); ++i)
    jobs.push_back({scene.pixel(i), edh::derive_seed(seed, {0, 0, i})});
  auto outcomes = edh::run_pixels_omp(jobs, opts, threads);
  std::vector<edh::PixelResult> results;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].ok())
      throw edh::Error("pixel " + std::to_string(i) + ": " + outcomes[i].error);
    results.push_back(std::move(outcomes[i].result));
  }
  return results;
}

int cmd_simulate(const CommonArgs& args, const std::string& out)
{
  const auto cfg = load(args);
  cfg.validate();
  const auto scene = scene_of(cfg);
  fs::create_directories(out);
  edh::save_depth_map(scene.depth_map, fs::path(out) / "truth.csv", edh::DepthFormat::csv);
  for (std::size_t i = 0; i < scene.num_pixels(); ++i) {
    const auto transient = edh::build_transient(scene.pixel(i), cfg.sim);
    const auto stream = edh::sample_stream(
      transient, cfg.sim.cycles, edh::derive_seed(cfg.global_seed, {0, 0, i}));
    stream.write_csv(fs::path(out) / ("stream_" + std::to_string(i) + ".csv"));
    std::cout << "pixel " << i << ": z=" << scene.pixel(i).z << " m, "
              << stream.total_photons() << " photons\n";
  }
  return 0;
}

int cmd_edh(const CommonArgs& args, const std::string& method_name, std::size_t q,
            const std::string& out, const std::string& format)
{
  auto cfg = load(args);
  const auto method = edh::parse_method(method_name);
  if (!edh::is_edh(method))
    throw edh::InvalidParams("edh needs one of oedh, pedh, hedh");
  cfg.q = q;
  cfg.validate();
  const auto scene = scene_of(cfg);
  auto opts = edh::PipelineOptions::from(cfg);
  opts.methods = {method};
  opts.estimators.clear();
  const auto results = run_scene(scene, opts, cfg.global_seed, args.threads);

  std::vector<edh::EdhBoundaries> bounds;
  for (const auto& r : results)
    bounds.push_back(*r.methods.front().bounds);
  const auto& map = scene.depth_map;
  if (out.empty()) {
    for (const auto& b : bounds) {
      for (std::size_t j = 0; j < b.bounds.size(); ++j)
        std::cout << (j ? "," : "") << b.bounds[j];
      std::cout << '\n';
    }
  } else if (format == "raw") {
    std::vector<float> payload;
    for (const auto& b : bounds)
      payload.insert(payload.end(), b.bounds.begin(), b.bounds.end());
    edh::write_tensor(out, edh::kFeatureMagic, map.width, map.height,
                      static_cast<std::uint32_t>(q + 1), payload);
  } else {
    edh::write_boundaries_csv(out, map.width, map.height, bounds);
  }
  return 0;
}

int cmd_estimate(const CommonArgs& args, const std::string& estimator_name,
                 const std::string& bounds_path, const std::string& method_name,
                 const std::string& out)
{
  auto cfg = load(args);
  cfg.validate();
  const auto estimator = edh::parse_estimator(estimator_name);
  edh::DistanceMap dist;
  dist.estimator = estimator;

  if (!bounds_path.empty()) {
    if (estimator == edh::EstimatorKind::ewh_peak)
      throw edh::InvalidParams("ewh_peak estimates need a histogram, not boundaries");
    const auto bounds = edh::read_boundaries_csv(bounds_path, &dist.width, &dist.height);
    for (const auto& b : bounds) {
      const double t = estimator == edh::EstimatorKind::t0
                         ? edh::t0_hat(b)
                         : edh::t1_hat(edh::rho1(b, cfg.knots));
      dist.distances.push_back(edh::bin_to_distance(t, cfg.sim));
    }
  } else {
    const auto method = edh::parse_method(
      method_name.empty() ? (estimator == edh::EstimatorKind::ewh_peak ? "ewh1024" : "pedh")
                          : method_name);
    if (!edh::applies(method, estimator))
      throw edh::InvalidParams("estimator does not apply to method");
    const auto scene = scene_of(cfg);
    auto opts = edh::PipelineOptions::from(cfg);
    opts.methods = {method};
    opts.estimators = {estimator};
    for (const auto& r : run_scene(scene, opts, cfg.global_seed, args.threads))
      dist.distances.push_back(r.methods.front().estimates.front().distance_m);
    dist.width = scene.depth_map.width;
    dist.height = scene.depth_map.height;
  }

  if (out.empty()) {
    for (double d : dist.distances)
      std::cout << d << '\n';
  } else {
    edh::save_depth_map(dist.as_depth_map(), out, edh::DepthFormat::csv);
  }
  return 0;
}

int cmd_evaluate(const std::string& truth_path, const std::string& est_path,
                 const std::string& inliers, const std::string& format,
                 const std::string& mode, double z_max)
{
  const auto fmt = edh::parse_depth_format(format);
  const auto truth = edh::load_depth_map(truth_path, fmt, z_max);
  const auto est = edh::load_depth_map(est_path, fmt, z_max, true);
  const auto thresholds = edh::parse_double_list(inliers);
  const auto report = edh::distance_metrics(est, truth, thresholds, z_max,
                                            edh::parse_inlier_mode(mode));
  std::cout << "pixels      " << report.n_pixels << '\n'
            << "rmse_cm     " << report.rmse_cm << '\n'
            << "mae_cm      " << report.mae_cm << '\n';
  for (const auto& [p, pct] : report.inlier_pct)
    std::cout << "inlier_" << p << "%   " << pct << '\n';
  std::cout << "\nn,rmse_cm,mae_cm";
  for (const auto& kv : report.inlier_pct)
    std::cout << ",inlier_" << kv.first;
  std::cout << '\n' << report.n_pixels << ',' << report.rmse_cm << ',' << report.mae_cm;
  for (const auto& kv : report.inlier_pct)
    std::cout << ',' << kv.second;
  std::cout << '\n';
  return 0;
}

int cmd_experiment(const CommonArgs& args, const std::string& out)
{
  auto cfg = load(args);
  if (!out.empty())
    cfg.output_dir = out;
  const auto result = edh::run_experiment(cfg, args.threads);
  edh::write_experiment(result, cfg, cfg.output_dir);
  std::cout << edh::format_table(result.summary, edh::resolve_mode(cfg));
  if (cfg.mode == edh::ExperimentMode::median_tracking)
    std::cout << '\n' << edh::median_tracking_table(result.summary);
  std::cout << "\nwrote " << cfg.output_dir.string() << '\n';
  if (result.failed_conditions > 0) {
    std::cerr << result.failed_conditions << " condition(s) failed\n";
    return 1;
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& param,
              const std::string& values, const std::string& base,
              const std::string& out)
{
  const auto cfg = load(args);
  edh::SweepSpec spec;
  spec.param = edh::parse_sweep_param(param);
  spec.values = edh::parse_double_list(values);
  if (base == "isolated")
    spec.base = edh::sweep_base(spec.param);
  else if (base == "config")
    spec.base = cfg.step;
  else
    throw edh::InvalidParams("--base must be 'isolated' or 'config'");
  const auto points = edh::sweep(spec, cfg, args.threads);
  const auto csv = edh::sweep_to_csv(spec.param, points);
  std::cout << csv;
  if (!out.empty()) {
    std::ofstream f(out, std::ios::trunc);
    f << csv;
  }
  for (const auto& p : points)
    if (p.failed_conditions > 0)
      return 1;
  return 0;
}

int cmd_export(const CommonArgs& args, const std::string& out)
{
  const auto cfg = load(args);
  cfg.validate();
  edh::export_density_features(scene_of(cfg), cfg, out, args.threads);
  std::cout << "wrote " << out << " and " << out << ".depth.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Equi-depth photon histogramming: simulation and evaluation"};
  app.require_subcommand(1);

  CommonArgs sim_args, edh_args, est_args, exp_args, sweep_args, exp_feat_args;

  auto* simulate = app.add_subcommand("simulate", "sample photon streams for a scene");
  add_common(simulate, sim_args);
  std::string sim_out;
  simulate->add_option("--out", sim_out, "output directory")->required();

  auto* edh_cmd = app.add_subcommand("edh", "compute equi-depth boundary sets");
  add_common(edh_cmd, edh_args);
  std::string method = "pedh", edh_out, edh_format = "csv";
  std::size_t q = 32;
  edh_cmd->add_option("--method", method)->check(CLI::IsMember({"oedh", "pedh", "hedh"}));
  edh_cmd->add_option("--q", q, "number of ED bins");
  edh_cmd->add_option("--out", edh_out, "output file (stdout when omitted)");
  edh_cmd->add_option("--format", edh_format)->check(CLI::IsMember({"csv", "raw"}));

  auto* estimate = app.add_subcommand("estimate", "estimate per-pixel distances");
  add_common(estimate, est_args);
  std::string estimator = "t0", bounds_path, est_method, est_out;
  estimate->add_option("--estimator", estimator)
    ->check(CLI::IsMember({"t0", "t1", "ewh_peak"}));
  estimate->add_option("--bounds", bounds_path, "boundary CSV written by 'edh'");
  estimate->add_option("--method", est_method, "method to run when no --bounds is given");
  estimate->add_option("--out", est_out, "distance map CSV (stdout when omitted)");

  auto* evaluate = app.add_subcommand("evaluate", "compare a distance map with ground truth");
  std::string truth, est, inliers = "2,10", eval_format = "csv", inlier_mode = "range";
  double z_max = edh::SimConfig{}.z_max();
  evaluate->add_option("--truth", truth)->required();
  evaluate->add_option("--est", est)->required();
  evaluate->add_option("--inliers", inliers, "comma-separated inlier thresholds in %");
  evaluate->add_option("--format", eval_format)->check(CLI::IsMember({"csv", "raw_f32"}));
  evaluate->add_option("--inlier-mode", inlier_mode)
    ->check(CLI::IsMember({"range", "relative"}));
  evaluate->add_option("--z-max", z_max, "unambiguous range in meters");

  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo comparison");
  add_common(experiment, exp_args);
  std::string exp_out;
  experiment->add_option("--out", exp_out, "output directory (overrides config)");

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one stepping parameter");
  add_common(sweep_cmd, sweep_args);
  std::string param, values, base = "isolated", sweep_out;
  sweep_cmd->add_option("--param", param)
    ->required()
    ->check(CLI::IsMember({"k_pct", "gamma", "beta1", "beta2"}));
  sweep_cmd->add_option("--values", values)->required();
  sweep_cmd->add_option("--base", base, "fixed settings: isolated (per-parameter defaults) or config");
  sweep_cmd->add_option("--out", sweep_out, "CSV output file");

  auto* export_cmd = app.add_subcommand("export-features", "write rho1 feature maps");
  add_common(export_cmd, exp_feat_args);
  std::string feat_out;
  export_cmd->add_option("--out", feat_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim_args, sim_out);
    if (*edh_cmd) return cmd_edh(edh_args, method, q, edh_out, edh_format);
    if (*estimate) return cmd_estimate(est_args, estimator, bounds_path, est_method, est_out);
    if (*evaluate) return cmd_evaluate(truth, est, inliers, eval_format, inlier_mode, z_max);
    if (*experiment) return cmd_experiment(exp_args, exp_out);
    if (*sweep_cmd) return cmd_sweep(sweep_args, param, values, base, sweep_out);
    if (*export_cmd) return cmd_export(exp_feat_args, feat_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
