#pragma once

#include "edh/config.hpp"
#include "edh/metrics.hpp"
#include "edh/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edh {

inline constexpr int kCsvSchemaVersion = 1;

/// One pixel of one Monte Carlo run under one method/estimator pairing.
struct SeedRecord
{
  std::size_t pair_index = 0;
  PhotonPair pair;
  std::uint32_t run = 0;
  std::size_t pixel = 0;
  double truth_m = 0.0;
  Method method = Method::oedh;
  std::optional<EstimatorKind> estimator;  // none: boundary-only record
  std::optional<double> estimate_m;
  double boundary_sq_sum = 0.0;
  std::size_t boundary_count = 0;
};

/// Aggregated metrics of one condition. `depth_m` is empty for rows pooled
/// over the whole scene.
struct ResultRow
{
  std::size_t pair_index = 0;
  PhotonPair pair;
  std::optional<double> depth_m;
  Method method = Method::oedh;
  std::optional<EstimatorKind> estimator;
  MetricsReport metrics;
  std::string error;  // non-empty: failed condition

  bool failed() const { return !error.empty(); }
};

struct ExperimentResult
{
  std::vector<ResultRow> rows;      // per (pair, depth, method, estimator)
  std::vector<ResultRow> summary;   // per (pair, method, estimator)
  std::vector<SeedRecord> per_seed;
  std::size_t failed_conditions = 0;
};

/// Effective configuration for a mode (median tracking forces q = 2 and the
/// fixed/optimized median binners).
ExperimentConfig resolve_mode(const ExperimentConfig& cfg);

/// Every (pair, run, pixel) is simulated once and shared by all methods.
/// A failing photon-level pair becomes error rows; the others still run.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 0);

/// Groups seed records into result rows, by depth or pooled over the scene.
std::vector<ResultRow> aggregate(std::span<const SeedRecord> records,
                                 const ExperimentConfig& cfg, bool by_depth);

/// Writes results.csv, summary.csv and per_seed.csv (plus median_tracking.csv
/// in that mode) into `dir`.
void write_experiment(const ExperimentResult& result, const ExperimentConfig& cfg,
                      const std::filesystem::path& dir);

std::string rows_to_csv(std::span<const ResultRow> rows, const ExperimentConfig& cfg);
std::string seed_records_to_csv(std::span<const SeedRecord> records);
std::vector<SeedRecord> parse_seed_records(const std::string& csv);

/// Table with one row per method and one column per background level.
std::string median_tracking_table(std::span<const ResultRow> summary);

/// Human-readable rendering of summary rows for the terminal.
std::string format_table(std::span<const ResultRow> rows, const ExperimentConfig& cfg);

enum class SweepParam { k_pct, gamma, beta1, beta2 };

SweepParam parse_sweep_param(std::string_view name);
std::string_view to_string(SweepParam p);

struct SweepSpec
{
  SweepParam param = SweepParam::gamma;
  std::vector<double> values;
  StepParams base;  // the other parameters stay at these values
};

/// Fixed settings used when tuning each parameter in isolation:
/// k_pct with beta1 = beta2 = 0, gamma = 1; gamma with k = 1, beta1 = beta2 = 0;
/// beta2 with beta1 = 0.5; beta1 with beta2 = 0.8.
StepParams sweep_base(SweepParam p);
StepParams with_value(StepParams params, SweepParam p, double value);

struct SweepPoint
{
  double value = 0.0;
  double boundary_rmse_bins = 0.0;  // mean over (pair, depth) conditions
  double distance_rmse_cm = 0.0;    // PEDH narrowest-bin estimate, same averaging
  std::size_t failed_conditions = 0;
};

/// Runs PEDH with the t0 estimator once per value. Throws InvalidSweepValue
/// if a value breaks the StepParams invariants.
std::vector<SweepPoint> sweep(const SweepSpec& spec, const ExperimentConfig& base_cfg,
                              int threads = 0);

/// Averages the pedh/t0 rows of an experiment the same way sweep() does.
SweepPoint summarize_pedh(const ExperimentResult& result, double value);

std::string sweep_to_csv(SweepParam p, std::span<const SweepPoint> points);

/// rho1 on the 1024-point grid as float features.
std::vector<float> density_features(const EdhBoundaries& bounds,
                                    KnotPlacement placement = KnotPlacement::midpoint);

/// Runs PEDH on every pixel (first photon pair, run 0) and writes the rho1
/// features as an EDHF container with 1024 channels, plus `<path>.depth.csv`
/// holding the ground-truth depths.
void export_density_features(const Scene& scene, const ExperimentConfig& cfg,
                             const std::filesystem::path& path, int threads = 0);

/// Boundary sets, one pixel per row, under a "# width height q" header.
void write_boundaries_csv(const std::filesystem::path& path, std::uint32_t width,
                          std::uint32_t height, std::span<const EdhBoundaries> bounds);
std::vector<EdhBoundaries> read_boundaries_csv(const std::filesystem::path& path,
                                               std::uint32_t* width = nullptr,
                                               std::uint32_t* height = nullptr);

/// Equal-width histograms, one pixel per row, under "# width height bins".
void write_histograms_csv(const std::filesystem::path& path, std::uint32_t width,
                          std::uint32_t height, std::span<const EwHistogram> hists);

}  // namespace edh
