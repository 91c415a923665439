#pragma once

#include "edh/binner.hpp"
#include "edh/estimator.hpp"
#include "edh/metrics.hpp"
#include "edh/scene.hpp"
#include "edh/sim_config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace edh {

enum class Method { oedh, pedh, hedh, ewh32, ewh1024 };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);
bool is_edh(Method method);
/// Estimators that make sense for the method's output.
bool applies(Method method, EstimatorKind estimator);

enum class ExperimentMode {
  standard,
  // Single median binner per stream (q = 2): fixed step vs optimized step.
  median_tracking,
};

struct PhotonPair
{
  double sig = 1.0;
  double bkg = 1.0;
  friend bool operator==(const PhotonPair&, const PhotonPair&) = default;
};

/// The eight (signal, background) per-cycle photon levels of the evaluation.
std::vector<PhotonPair> default_photon_pairs();

struct ExperimentConfig
{
  std::string scene = "staircase:n=10,zmin=1.5,zmax=13.5";
  SimConfig sim;
  std::vector<PhotonPair> pairs = default_photon_pairs();
  std::vector<Method> methods = {Method::oedh, Method::pedh, Method::hedh,
                                 Method::ewh32, Method::ewh1024};
  std::vector<EstimatorKind> estimators = {EstimatorKind::t0, EstimatorKind::t1,
                                           EstimatorKind::ewh_peak};
  StepParams step;
  std::size_t q = 32;
  double fixed_step = 1.0;  // HEDH / fixed-step median binner, in bins
  KnotPlacement knots = KnotPlacement::midpoint;
  std::uint32_t n_monte_carlo = 50;
  std::uint64_t global_seed = 42;
  std::vector<double> inlier_thresholds = {2.0, 10.0};
  InlierMode inlier_mode = InlierMode::range;
  ExperimentMode mode = ExperimentMode::standard;
  std::filesystem::path output_dir = "edh_out";

  void validate() const;
};

/// Applies one "key = value" setting. Throws InvalidParams on unknown keys
/// or malformed values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Reads a flat key = value file ('#' starts a comment), then applies the
/// EDH_SEED environment override.
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_env_overrides(ExperimentConfig& cfg);

/// Scene specs: "constant:z=7.5,w=4,h=4", "staircase:n=10,zmin=1.5,zmax=13.5",
/// "two_plane:z1=3,z2=12,w=8,h=4", "csv:<path>" or "raw:<path>".
Scene make_scene(std::string_view spec, double z_max, double phi_sig = 1.0,
                 double phi_bkg = 1.0);

std::vector<double> parse_double_list(std::string_view text);

}  // namespace edh
