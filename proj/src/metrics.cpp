#include "edh/metrics.hpp"

#include "edh/errors.hpp"

#include <cmath>
#include <string>

namespace edh {

InlierMode parse_inlier_mode(std::string_view name)
{
  if (name == "range")
    return InlierMode::range;
  if (name == "relative")
    return InlierMode::relative;
  throw InvalidParams("unknown inlier mode '" + std::string(name) + "'");
}

double pairwise_sum(std::span<const double> values)
{
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values)
      s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MetricsReport distance_metrics(std::span<const double> estimated,
                               std::span<const double> truth,
                               std::span<const double> thresholds_pct,
                               double z_max, InlierMode mode)
{
  if (estimated.size() != truth.size())
    throw ShapeMismatch("estimate has " + std::to_string(estimated.size()) +
                        " pixels, truth has " + std::to_string(truth.size()));
  MetricsReport r;
  r.n_pixels = truth.size();
  if (r.n_pixels == 0)
    return r;

  std::vector<double> abs_err(r.n_pixels), sq_err(r.n_pixels);
  for (std::size_t i = 0; i < r.n_pixels; ++i) {
    const double e = std::abs(estimated[i] - truth[i]);
    abs_err[i] = e;
    sq_err[i] = e * e;
  }
  const double n = static_cast<double>(r.n_pixels);
  r.mae_cm = 100.0 * pairwise_sum(abs_err) / n;
  r.rmse_cm = 100.0 * std::sqrt(pairwise_sum(sq_err) / n);

  for (double p : thresholds_pct) {
    std::size_t inliers = 0;
    for (std::size_t i = 0; i < r.n_pixels; ++i) {
      const double ref = mode == InlierMode::range ? z_max : truth[i];
      if (abs_err[i] <= p / 100.0 * ref)
        ++inliers;
    }
    r.inlier_pct[p] = 100.0 * static_cast<double>(inliers) / n;
  }
  return r;
}

MetricsReport distance_metrics(const DepthMap& estimated, const DepthMap& truth,
                               std::span<const double> thresholds_pct,
                               double z_max, InlierMode mode)
{
  if (estimated.width != truth.width || estimated.height != truth.height)
    throw ShapeMismatch("estimate is " + std::to_string(estimated.width) + "x" +
                        std::to_string(estimated.height) + ", truth is " +
                        std::to_string(truth.width) + "x" +
                        std::to_string(truth.height));
  return distance_metrics(estimated.depths, truth.depths, thresholds_pct, z_max,
                          mode);
}

std::vector<double> boundary_squared_errors(const EdhBoundaries& estimate,
                                            const EdhBoundaries& oracle)
{
  if (estimate.q != oracle.q)
    throw QMismatch("boundary sets track q = " + std::to_string(estimate.q) +
                    " and q = " + std::to_string(oracle.q));
  std::vector<double> out;
  out.reserve(estimate.q - 1);
  const auto a = estimate.interior();
  const auto b = oracle.interior();
  for (std::size_t j = 0; j < a.size(); ++j)
    out.push_back((a[j] - b[j]) * (a[j] - b[j]));
  return out;
}

double boundary_rmse(const EdhBoundaries& estimate, const EdhBoundaries& oracle)
{
  const auto sq = boundary_squared_errors(estimate, oracle);
  if (sq.empty())
    return 0.0;
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
}

}  // namespace edh
