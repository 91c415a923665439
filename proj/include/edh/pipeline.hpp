#pragma once

#include "edh/config.hpp"
#include "edh/histogram.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edh {

/// Everything a single-pixel run needs besides the pixel and its seed.
struct PipelineOptions
{
  SimConfig sim;
  std::vector<Method> methods;
  std::vector<EstimatorKind> estimators;
  StepParams step;
  std::size_t q = 32;
  double fixed_step = 1.0;
  KnotPlacement knots = KnotPlacement::midpoint;

  static PipelineOptions from(const ExperimentConfig& cfg);
};

struct Estimate
{
  EstimatorKind estimator;
  double time_bins;
  double distance_m;
};

struct MethodOutput
{
  Method method;
  std::uint64_t input_checksum = 0;  // checksum of the stream this method read
  std::optional<EdhBoundaries> bounds;
  std::optional<EwHistogram> histogram;
  // Interior-boundary squared errors against the oracle of the same stream.
  std::vector<double> boundary_sq_errors;
  std::vector<Estimate> estimates;
};

struct PixelResult
{
  std::uint64_t seed = 0;
  std::uint64_t stream_checksum = 0;
  std::size_t photons = 0;
  double truth_m = 0.0;
  std::vector<MethodOutput> methods;

  const MethodOutput* find(Method m) const;
};

/// Samples one stream from Rng(seed) and feeds the identical stream to every
/// requested method, then applies each applicable estimator.
PixelResult run_pixel_pipeline(const PixelConfig& pixel, const PipelineOptions& opts,
                               std::uint64_t seed);
/// Same, on a stream supplied by the caller.
PixelResult run_stream_pipeline(const PhotonStream& stream, double truth_m,
                                const PipelineOptions& opts);

struct PixelJob
{
  PixelConfig pixel;
  std::uint64_t seed = 0;
};

struct PixelOutcome
{
  PixelResult result;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

/// Reference kernel: one job after another.
std::vector<PixelOutcome> run_pixels_serial(std::span<const PixelJob> jobs,
                                            const PipelineOptions& opts);

/// OpenMP kernel over jobs. Output slot i always holds job i, so results
/// match the serial kernel bit for bit for any thread count. `threads` <= 0
/// uses the OpenMP default.
std::vector<PixelOutcome> run_pixels_omp(std::span<const PixelJob> jobs,
                                         const PipelineOptions& opts,
                                         int threads = 0);

}  // namespace edh
