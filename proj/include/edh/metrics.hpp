#pragma once

#include "edh/histogram.hpp"
#include "edh/scene.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace edh {

/// Reference quantity for the p% inlier threshold.
enum class InlierMode {
  range,     // |error| <= p% of z_max
  relative,  // |error| <= p% of the true depth
};

InlierMode parse_inlier_mode(std::string_view name);

struct MetricsReport
{
  double rmse_cm = 0.0;
  double mae_cm = 0.0;
  std::map<double, double> inlier_pct;  // threshold p -> percent of pixels
  std::optional<double> boundary_rmse_bins;
  std::size_t n_pixels = 0;
};

/// Deterministic pairwise sum; the order depends only on the input length.
double pairwise_sum(std::span<const double> values);

/// Metrics over paired estimate / truth distances in meters (reported in cm).
MetricsReport distance_metrics(std::span<const double> estimated,
                               std::span<const double> truth,
                               std::span<const double> thresholds_pct,
                               double z_max, InlierMode mode = InlierMode::range);

/// Throws ShapeMismatch when the maps differ in shape.
MetricsReport distance_metrics(const DepthMap& estimated, const DepthMap& truth,
                               std::span<const double> thresholds_pct,
                               double z_max, InlierMode mode = InlierMode::range);

/// RMS difference over interior boundaries. Throws QMismatch.
double boundary_rmse(const EdhBoundaries& estimate, const EdhBoundaries& oracle);

/// Squared interior-boundary errors, for pooling across runs.
std::vector<double> boundary_squared_errors(const EdhBoundaries& estimate,
                                            const EdhBoundaries& oracle);

}  // namespace edh
