#include "edh/pipeline.hpp"

#include "edh/errors.hpp"
#include "edh/estimator.hpp"
#include "edh/metrics.hpp"

#include <algorithm>

namespace edh {
namespace {

void estimate_edh(MethodOutput& out, const PipelineOptions& opts)
{
  for (EstimatorKind e : opts.estimators) {
    if (!applies(out.method, e))
      continue;
    const double t = e == EstimatorKind::t0 ? t0_hat(*out.bounds)
                                            : t1_hat(rho1(*out.bounds, opts.knots));
    out.estimates.push_back({e, t, bin_to_distance(t, opts.sim)});
  }
}

void estimate_ewh(MethodOutput& out, const PipelineOptions& opts)
{
  for (EstimatorKind e : opts.estimators) {
    if (!applies(out.method, e))
      continue;
    const double t = ewh_peak(*out.histogram);
    out.estimates.push_back({e, t, bin_to_distance(t, opts.sim)});
  }
}

}  // namespace

PipelineOptions PipelineOptions::from(const ExperimentConfig& cfg)
{
  PipelineOptions o;
  o.sim = cfg.sim;
  o.methods = cfg.methods;
  o.estimators = cfg.estimators;
  o.step = cfg.step;
  o.q = cfg.q;
  o.fixed_step = cfg.fixed_step;
  o.knots = cfg.knots;
  return o;
}

const MethodOutput* PixelResult::find(Method m) const
{
  const auto it = std::find_if(methods.begin(), methods.end(),
                               [m](const MethodOutput& o) { return o.method == m; });
  return it == methods.end() ? nullptr : &*it;
}

PixelResult run_stream_pipeline(const PhotonStream& stream, double truth_m,
                                const PipelineOptions& opts)
{
  PixelResult r;
  r.seed = stream.seed();
  r.stream_checksum = stream.checksum();
  r.photons = stream.total_photons();
  r.truth_m = truth_m;

  const bool any_edh = std::any_of(opts.methods.begin(), opts.methods.end(), is_edh);
  std::optional<EdhBoundaries> oracle;
  if (any_edh)
    oracle = oedh(stream, opts.q);

  for (Method m : opts.methods) {
    MethodOutput out;
    out.method = m;
    out.input_checksum = stream.checksum();
    switch (m) {
      case Method::oedh: out.bounds = *oracle; break;
      case Method::pedh: out.bounds = pedh(stream, opts.q, opts.step); break;
      case Method::hedh: out.bounds = hedh(stream, opts.q, opts.fixed_step); break;
      case Method::ewh32: out.histogram = ewh(stream, 32); break;
      case Method::ewh1024: out.histogram = ewh(stream, 1024); break;
    }
    if (out.bounds) {
      out.boundary_sq_errors = boundary_squared_errors(*out.bounds, *oracle);
      estimate_edh(out, opts);
    } else {
      estimate_ewh(out, opts);
    }
    r.methods.push_back(std::move(out));
  }
  return r;
}

PixelResult run_pixel_pipeline(const PixelConfig& pixel, const PipelineOptions& opts,
                               std::uint64_t seed)
{
  const Transient transient = build_transient(pixel, opts.sim);
  const PhotonStream stream = sample_stream(transient, opts.sim.cycles, seed);
  return run_stream_pipeline(stream, pixel.z, opts);
}

std::vector<PixelOutcome> run_pixels_serial(std::span<const PixelJob> jobs,
                                            const PipelineOptions& opts)
{
  std::vector<PixelOutcome> out(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      out[i].result = run_pixel_pipeline(jobs[i].pixel, opts, jobs[i].seed);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  }
  return out;
}

}  // namespace edh
