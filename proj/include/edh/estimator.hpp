#pragma once

#include "edh/histogram.hpp"
#include "edh/scene.hpp"
#include "edh/sim_config.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace edh {

enum class EstimatorKind { t0, t1, ewh_peak };

EstimatorKind parse_estimator(std::string_view name);
std::string_view to_string(EstimatorKind kind);

/// Where rho1 places the knot of each ED bin.
enum class KnotPlacement { midpoint, left_edge };

KnotPlacement parse_knot_placement(std::string_view name);

inline constexpr std::size_t kDensityGridSize = 1024;

/// Piecewise-constant density over the boundary set. Zero-width bins are
/// folded into the next bin of positive width (the previous one at the end
/// of the axis), so each piece carries the mass of every bin it absorbed and
/// sum(width * value) == q.
struct PiecewiseDensity
{
  std::vector<double> edges;   // pieces + 1 positions
  std::vector<double> values;  // mass / width per piece

  std::size_t pieces() const { return values.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double mass() const;
};

struct DensityEstimate
{
  std::vector<double> grid;    // kDensityGridSize positions i * B / 1024
  std::vector<double> values;  // rho1 at each grid position
  EdhBoundaries source_bounds;
};

PiecewiseDensity rho0(const EdhBoundaries& bounds);

/// Midpoint of the narrowest bin (smallest index on ties), in bin units.
double t0_hat(const EdhBoundaries& bounds);

/// Linear interpolation of (knot, rho0) pairs on the 1024-point grid,
/// held constant beyond the outermost knots.
DensityEstimate rho1(const EdhBoundaries& bounds,
                     KnotPlacement placement = KnotPlacement::midpoint);

/// Grid position of the rho1 maximum (smallest index on ties).
double t1_hat(const DensityEstimate& density);

/// Centre of the largest bin of an equal-width histogram spanning
/// [0, num_bins). Throws EmptyHistogram when nothing was counted.
double peak_position(std::span<const double> counts, double num_bins);
double ewh_peak(const EwHistogram& hist);

/// z = c * (t * dt) / 2. Throws OutOfRange unless 0 <= t <= B.
double bin_to_distance(double t, const SimConfig& cfg);

/// Estimated per-pixel distances in meters.
struct DistanceMap
{
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> distances;
  EstimatorKind estimator = EstimatorKind::t0;

  DepthMap as_depth_map() const { return DepthMap{width, height, distances}; }
};

}  // namespace edh
