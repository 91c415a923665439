#include "edh/config.hpp"
#include "edh/errors.hpp"
#include "edh/harness.hpp"
#include "edh/pipeline.hpp"
#include "edh/tensor_io.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace edh;

namespace {

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config()
{
  ExperimentConfig cfg;
  cfg.scene = "staircase:n=10,zmin=1.5,zmax=13.5";
  cfg.pairs = {{1.0, 0.5}, {1.0, 2.0}};
  cfg.n_monte_carlo = 5;
  return cfg;
}

}  // namespace

TEST(Pipeline, MethodsShareOneStream)
{
  ExperimentConfig cfg;
  cfg.methods = {Method::oedh, Method::pedh, Method::hedh, Method::ewh32};
  const PipelineOptions opts = PipelineOptions::from(cfg);
  for (std::uint64_t seed : {1u, 99u, 12345u}) {
    const PixelResult r = run_pixel_pipeline({5.5, 1.0, 2.0}, opts, seed);
    const PhotonStream s =
        sample_stream(build_transient({5.5, 1.0, 2.0}, cfg.sim), cfg.sim.cycles, seed);
    EXPECT_EQ(r.stream_checksum, s.checksum());
    EXPECT_EQ(r.seed, seed);
    ASSERT_EQ(r.methods.size(), 4u);
    for (const MethodOutput& m : r.methods)
      EXPECT_EQ(m.input_checksum, r.stream_checksum);
  }
}

TEST(Pipeline, StrongSignalNoBackground)
{
  ExperimentConfig cfg;
  cfg.methods = {Method::pedh};
  cfg.estimators = {EstimatorKind::t0};
  const PipelineOptions opts = PipelineOptions::from(cfg);
  const PixelResult r = run_pixel_pipeline({7.5, 5.0, 0.0}, opts, 7);
  const double two_bins_m = 2.0 * cfg.sim.bin_width_s() * cfg.sim.light_speed / 2.0;
  ASSERT_EQ(r.methods[0].estimates.size(), 1u);
  EXPECT_NEAR(r.methods[0].estimates[0].distance_m, 7.5, two_bins_m);
}

TEST(Pipeline, BoundaryErrorsAgainstSameStreamOracle)
{
  ExperimentConfig cfg;
  cfg.methods = {Method::oedh, Method::pedh};
  const PipelineOptions opts = PipelineOptions::from(cfg);
  const PixelResult r = run_pixel_pipeline({3.3, 1.0, 1.0}, opts, 5);
  EXPECT_EQ(r.find(Method::oedh)->boundary_sq_errors,
            std::vector<double>(31, 0.0));
  const auto* p = r.find(Method::pedh);
  ASSERT_EQ(p->boundary_sq_errors.size(), 31u);
  for (std::size_t i = 0; i < 31; ++i) {
    const double d = p->bounds->interior()[i] - r.find(Method::oedh)->bounds->interior()[i];
    EXPECT_DOUBLE_EQ(p->boundary_sq_errors[i], d * d);
  }
}

TEST(Experiment, RowShape)
{
  const ExperimentConfig cfg = small_config();
  const ExperimentResult res = run_experiment(cfg);
  EXPECT_EQ(res.failed_conditions, 0u);
  // oedh/pedh/hedh x {t0, t1} plus ewh32/ewh1024 x ewh_peak, at 10 depths.
  EXPECT_EQ(res.rows.size(), 2u * 10 * 8);
  EXPECT_EQ(res.summary.size(), 2u * 8);
  EXPECT_EQ(res.per_seed.size(), 2u * 5 * 10 * 8);
  for (const ResultRow& r : res.rows) {
    EXPECT_EQ(r.metrics.n_pixels, 5u);
    EXPECT_FALSE(r.failed());
    EXPECT_EQ(r.metrics.boundary_rmse_bins.has_value(), is_edh(r.method));
  }
  const std::string csv = rows_to_csv(res.rows, cfg);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 160);
  EXPECT_EQ(csv.rfind("schema_version,", 0), 0u);
}

TEST(Experiment, ByteIdenticalOutputs)
{
  const ExperimentConfig cfg = small_config();
  const auto a = test::temp_dir("exp_a");
  const auto b = test::temp_dir("exp_b");
  write_experiment(run_experiment(cfg, 1), cfg, a);
  write_experiment(run_experiment(cfg, 4), cfg, b);
  for (const char* f : {"results.csv", "summary.csv", "per_seed.csv"}) {
    const std::string x = slurp(a / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(b / f)) << f;
  }
}

TEST(Experiment, ReaggregatedSeedsMatchSummary)
{
  const ExperimentConfig cfg = small_config();
  const ExperimentResult res = run_experiment(cfg);
  const auto parsed = parse_seed_records(seed_records_to_csv(res.per_seed));
  ASSERT_EQ(parsed.size(), res.per_seed.size());
  EXPECT_EQ(rows_to_csv(aggregate(parsed, cfg, false), cfg), rows_to_csv(res.summary, cfg));
  EXPECT_EQ(rows_to_csv(aggregate(parsed, cfg, true), cfg), rows_to_csv(res.rows, cfg));

  // One summary cell recomputed by hand from the raw records.
  double abs_sum = 0.0;
  int n = 0;
  for (const SeedRecord& r : res.per_seed)
    if (r.pair_index == 1 && r.method == Method::pedh && r.estimator == EstimatorKind::t1) {
      abs_sum += std::abs(*r.estimate_m - r.truth_m);
      ++n;
    }
  ASSERT_EQ(n, 50);
  for (const ResultRow& r : res.summary)
    if (r.pair_index == 1 && r.method == Method::pedh && r.estimator == EstimatorKind::t1)
      EXPECT_NEAR(r.metrics.mae_cm, 100.0 * abs_sum / n, 1e-9);
}

TEST(Experiment, FailingPairBecomesErrorRows)
{
  ExperimentConfig cfg = small_config();
  cfg.pairs = {{0.0, 0.001}, {1.0, 1.0}};
  const ExperimentResult res = run_experiment(cfg);
  EXPECT_EQ(res.failed_conditions, 1u);
  std::size_t errors = 0;
  for (const ResultRow& r : res.rows) {
    if (r.pair_index == 0) {
      EXPECT_TRUE(r.failed());
      ++errors;
    } else {
      EXPECT_FALSE(r.failed());
    }
  }
  EXPECT_EQ(errors, cfg.methods.size());
  const std::string csv = rows_to_csv(res.rows, cfg);
  EXPECT_NE(csv.find(",error,"), std::string::npos);
}

TEST(Experiment, MedianTrackingTableLayout)
{
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::median_tracking;
  cfg.scene = "constant:z=7.5,w=1,h=1";
  cfg.pairs = {{1.0, 0.5}, {1.0, 1.0}, {1.0, 2.0}, {1.0, 5.0}};
  cfg.n_monte_carlo = 3;
  const ExperimentResult res = run_experiment(cfg);
  const std::string table = median_tracking_table(res.summary);
  std::istringstream in(table);
  std::string header, fixed, optimized;
  std::getline(in, header);
  std::getline(in, fixed);
  std::getline(in, optimized);
  EXPECT_EQ(header, "binner,bkg_0.5,bkg_1,bkg_2,bkg_5");
  EXPECT_EQ(fixed.rfind("fixed_step,", 0), 0u);
  EXPECT_EQ(optimized.rfind("optimized_step,", 0), 0u);
  EXPECT_EQ(std::count(fixed.begin(), fixed.end(), ','), 4);
}

TEST(Sweep, SingleValueMatchesExperiment)
{
  ExperimentConfig cfg = small_config();
  cfg.n_monte_carlo = 2;
  SweepSpec spec;
  spec.param = SweepParam::gamma;
  spec.values = {0.999};
  spec.base = sweep_base(SweepParam::gamma);
  const auto pts = sweep(spec, cfg);
  ASSERT_EQ(pts.size(), 1u);

  ExperimentConfig direct = cfg;
  direct.methods = {Method::pedh};
  direct.estimators = {EstimatorKind::t0};
  direct.step = with_value(spec.base, SweepParam::gamma, 0.999);
  const SweepPoint ref = summarize_pedh(run_experiment(direct), 0.999);
  EXPECT_EQ(pts[0].boundary_rmse_bins, ref.boundary_rmse_bins);
  EXPECT_EQ(pts[0].distance_rmse_cm, ref.distance_rmse_cm);
}

TEST(Sweep, BaseSettingsAndValidation)
{
  const StepParams g = sweep_base(SweepParam::gamma);
  EXPECT_EQ(g.k_pct, 1.0);
  EXPECT_EQ(g.beta1, 0.0);
  EXPECT_EQ(g.beta2, 0.0);
  const StepParams k = sweep_base(SweepParam::k_pct);
  EXPECT_EQ(k.gamma, 1.0);
  EXPECT_EQ(k.beta1, 0.0);
  EXPECT_EQ(k.beta2, 0.0);

  SweepSpec spec;
  spec.param = SweepParam::gamma;
  spec.values = {0.99, 1.5};
  EXPECT_THROW(sweep(spec, small_config()), InvalidSweepValue);
  spec.param = SweepParam::beta1;
  spec.values = {1.0};
  EXPECT_THROW(sweep(spec, small_config()), InvalidSweepValue);
  spec.values = {};
  EXPECT_THROW(sweep(spec, small_config()), InvalidSweepValue);
}

TEST(Features, FileSizeAndRoundTrip)
{
  ExperimentConfig cfg;
  cfg.sim.cycles = 2000;
  const Scene scene = make_scene("constant:z=7.5,w=2,h=2", cfg.sim.z_max());
  const auto dir = test::temp_dir("features");
  export_density_features(scene, cfg, dir / "f.edhf");
  EXPECT_EQ(std::filesystem::file_size(dir / "f.edhf"), 16u + 2 * 2 * 1024 * 4);

  const ChannelTensor t = read_tensor(dir / "f.edhf", kFeatureMagic);
  EXPECT_EQ(t.width, 2u);
  EXPECT_EQ(t.height, 2u);
  EXPECT_EQ(t.channels, 1024u);
  PipelineOptions opts = PipelineOptions::from(cfg);
  opts.methods = {Method::pedh};
  opts.estimators.clear();
  for (std::size_t i = 0; i < 4; ++i) {
    const PixelResult r =
        run_pixel_pipeline(scene.pixel(i), opts, derive_seed(cfg.global_seed, {0, 0, i}));
    const auto expected = density_features(*r.find(Method::pedh)->bounds);
    const auto got = t.pixel(i);
    ASSERT_EQ(got.size(), expected.size());
    EXPECT_TRUE(std::equal(got.begin(), got.end(), expected.begin()));
  }
  const DepthMap truth = load_depth_map(dir / "f.edhf.depth.csv", DepthFormat::csv,
                                        cfg.sim.z_max());
  EXPECT_EQ(truth, scene.depth_map);

  cfg.methods = {Method::oedh};
  EXPECT_THROW(export_density_features(scene, cfg, dir / "g.edhf"), InvalidParams);
}

TEST(Features, UniformBoundsAreFlat)
{
  std::vector<double> interior;
  for (int j = 1; j < 32; ++j)
    interior.push_back(32.0 * j);
  const auto f = density_features(EdhBoundaries::from_interior(interior, 1024));
  ASSERT_EQ(f.size(), 1024u);
  for (float v : f)
    EXPECT_EQ(v, static_cast<float>(32.0 / 1024));
}

TEST(BoundaryFiles, RoundTrip)
{
  const auto dir = test::temp_dir("bounds");
  std::vector<EdhBoundaries> sets;
  for (int i = 0; i < 6; ++i)
    sets.push_back(EdhBoundaries::from_interior({100.0 + i, 512.25, 900.0 / (i + 1)}, 1024));
  write_boundaries_csv(dir / "b.csv", 3, 2, sets);
  std::uint32_t w = 0, h = 0;
  const auto back = read_boundaries_csv(dir / "b.csv", &w, &h);
  EXPECT_EQ(w, 3u);
  EXPECT_EQ(h, 2u);
  EXPECT_EQ(back, sets);
}

TEST(Config, FileParsingAndOverrides)
{
  const auto dir = test::temp_dir("config");
  std::ofstream(dir / "a.cfg") << "# comment\nseed = 7\nsim.cycles = 1234\n"
                                  "step.gamma = 0.999  # trailing\n"
                                  "photons.pairs = 1:0.5, 0.5:2.5\n"
                                  "methods = pedh,ewh32\nestimators = t1,ewh_peak\n"
                                  "experiment.inlier_mode = relative\n"
                                  "step.clip = 0.02\nedh.q = 16\n";
  unsetenv("EDH_SEED");
  ExperimentConfig cfg = load_config(dir / "a.cfg");
  EXPECT_EQ(cfg.global_seed, 7u);
  EXPECT_EQ(cfg.sim.cycles, 1234u);
  EXPECT_EQ(cfg.step.gamma, 0.999);
  EXPECT_EQ(cfg.pairs, (std::vector<PhotonPair>{{1.0, 0.5}, {0.5, 2.5}}));
  EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::pedh, Method::ewh32}));
  EXPECT_EQ(cfg.inlier_mode, InlierMode::relative);
  EXPECT_EQ(cfg.step.clip, 0.02);
  EXPECT_EQ(cfg.q, 16u);

  setenv("EDH_SEED", "99", 1);
  EXPECT_EQ(load_config(dir / "a.cfg").global_seed, 99u);
  unsetenv("EDH_SEED");

  std::ofstream(dir / "b.cfg") << "seed = 1\nstep.nonsense = 3\n";
  try {
    load_config(dir / "b.cfg");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 2u);
  }
  EXPECT_THROW(load_config(dir / "missing.cfg"), FileNotFound);
}

TEST(Config, Validation)
{
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.methods.clear();
  EXPECT_THROW(cfg.validate(), InvalidParams);
  cfg = {};
  cfg.estimators.clear();
  EXPECT_THROW(cfg.validate(), InvalidParams);
  cfg = {};
  cfg.n_monte_carlo = 0;
  EXPECT_THROW(cfg.validate(), InvalidParams);
  cfg = {};
  cfg.q = 12;
  EXPECT_THROW(cfg.validate(), QNotPowerOfTwo);
  cfg.methods = {Method::oedh, Method::pedh};
  EXPECT_NO_THROW(cfg.validate());
  cfg = {};
  cfg.sim.cycles = 3000;
  EXPECT_THROW(cfg.validate(), InvalidParams);
}

TEST(Config, DefaultPhotonPairs)
{
  EXPECT_EQ(default_photon_pairs(),
            (std::vector<PhotonPair>{{1.0, 1.0}, {1.0, 2.0}, {1.0, 5.0}, {1.0, 10.0},
                                     {0.5, 0.5}, {0.5, 1.0}, {0.5, 2.5}, {0.5, 5.0}}));
}

TEST(Config, SceneSpecs)
{
  const double zmax = SimConfig{}.z_max();
  EXPECT_EQ(make_scene("constant:z=2,w=3,h=2", zmax).num_pixels(), 6u);
  const Scene tp = make_scene("two_plane:z1=3,z2=12,w=4,h=1", zmax, 0.5, 2.5);
  EXPECT_EQ(tp.depth_map.depths, (std::vector<double>{3, 3, 12, 12}));
  EXPECT_EQ(tp.pixel(0).phi_bkg_total, 2.5);
  EXPECT_THROW(make_scene("cube:z=1", zmax), InvalidParams);
  EXPECT_THROW(make_scene("constant:z=1,q=3", zmax), InvalidParams);
}
