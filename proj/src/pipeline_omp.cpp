#include "edh/pipeline.hpp"

#include <omp.h>

namespace edh {

std::vector<PixelOutcome> run_pixels_omp(std::span<const PixelJob> jobs,
                                         const PipelineOptions& opts, int threads)
{
  std::vector<PixelOutcome> out(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();

  // Exceptions must not escape the parallel region; each slot records its own.
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      out[idx].result = run_pixel_pipeline(jobs[idx].pixel, opts, jobs[idx].seed);
    } catch (const std::exception& e) {
      out[idx].error = e.what();
    }
  }
  return out;
}

}  // namespace edh
