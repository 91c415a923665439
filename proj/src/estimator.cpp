#include "edh/estimator.hpp"

#include "edh/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace edh {

EstimatorKind parse_estimator(std::string_view name)
{
  if (name == "t0")
    return EstimatorKind::t0;
  if (name == "t1")
    return EstimatorKind::t1;
  if (name == "ewh_peak")
    return EstimatorKind::ewh_peak;
  throw InvalidParams("unknown estimator '" + std::string(name) + "'");
}

std::string_view to_string(EstimatorKind kind)
{
  switch (kind) {
    case EstimatorKind::t0: return "t0";
    case EstimatorKind::t1: return "t1";
    case EstimatorKind::ewh_peak: return "ewh_peak";
  }
  return "?";
}

KnotPlacement parse_knot_placement(std::string_view name)
{
  if (name == "midpoint")
    return KnotPlacement::midpoint;
  if (name == "left_edge")
    return KnotPlacement::left_edge;
  throw InvalidParams("unknown knot placement '" + std::string(name) + "'");
}

double PiecewiseDensity::mass() const
{
  double m = 0.0;
  for (std::size_t i = 0; i < pieces(); ++i)
    m += width(i) * values[i];
  return m;
}

PiecewiseDensity rho0(const EdhBoundaries& bounds)
{
  bounds.validate();
  PiecewiseDensity d;
  d.edges.push_back(bounds.bounds.front());
  std::vector<double> masses;
  double pending = 0.0;
  for (std::size_t j = 1; j <= bounds.q; ++j) {
    pending += 1.0;
    if (bounds.bounds[j] > d.edges.back()) {
      d.edges.push_back(bounds.bounds[j]);
      masses.push_back(pending);
      pending = 0.0;
    }
  }
  if (pending > 0.0)
    masses.back() += pending;

  d.values.resize(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i)
    d.values[i] = masses[i] / d.width(i);
  return d;
}

double t0_hat(const EdhBoundaries& bounds)
{
  const PiecewiseDensity d = rho0(bounds);
  const auto best = static_cast<std::size_t>(
    std::max_element(d.values.begin(), d.values.end()) - d.values.begin());
  return 0.5 * (d.edges[best] + d.edges[best + 1]);
}

DensityEstimate rho1(const EdhBoundaries& bounds, KnotPlacement placement)
{
  const PiecewiseDensity d = rho0(bounds);
  std::vector<double> knots(d.pieces());
  for (std::size_t i = 0; i < d.pieces(); ++i)
    knots[i] = placement == KnotPlacement::midpoint
                 ? 0.5 * (d.edges[i] + d.edges[i + 1])
                 : d.edges[i];

  DensityEstimate est;
  est.source_bounds = bounds;
  est.grid.resize(kDensityGridSize);
  est.values.resize(kDensityGridSize);
  const double spacing = bounds.num_bins / kDensityGridSize;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < kDensityGridSize; ++i) {
    const double t = static_cast<double>(i) * spacing;
    est.grid[i] = t;
    if (t <= knots.front()) {
      est.values[i] = d.values.front();
      continue;
    }
    if (t >= knots.back()) {
      est.values[i] = d.values.back();
      continue;
    }
    while (knots[seg + 1] < t)
      ++seg;
    const double x0 = knots[seg], x1 = knots[seg + 1];
    const double y0 = d.values[seg], y1 = d.values[seg + 1];
    est.values[i] = y0 + (y1 - y0) * (t - x0) / (x1 - x0);
  }
  return est;
}

double t1_hat(const DensityEstimate& density)
{
  if (density.values.empty() || density.values.size() != density.grid.size())
    throw InvalidParams("density estimate is empty or malformed");
  const auto best =
    std::max_element(density.values.begin(), density.values.end()) -
    density.values.begin();
  return density.grid[static_cast<std::size_t>(best)];
}

double peak_position(std::span<const double> counts, double num_bins)
{
  if (counts.empty())
    throw EmptyHistogram("histogram has no bins");
  const auto best = std::max_element(counts.begin(), counts.end());
  if (!(*best > 0.0))
    throw EmptyHistogram("histogram holds no photons");
  const auto idx = static_cast<double>(best - counts.begin());
  return (idx + 0.5) * num_bins / static_cast<double>(counts.size());
}

double ewh_peak(const EwHistogram& hist)
{
  std::vector<double> counts(hist.bins.begin(), hist.bins.end());
  return peak_position(counts, hist.num_bins);
}

double bin_to_distance(double t, const SimConfig& cfg)
{
  if (!(t >= 0.0 && t <= cfg.num_bins))
    throw OutOfRange("bin position " + std::to_string(t) + " outside [0, B]");
  return cfg.light_speed * (t * cfg.bin_width_s()) / 2.0;
}

}  // namespace edh
