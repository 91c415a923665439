// Serial reference kernel vs OpenMP kernel on a staircase scene.

#include "edh/config.hpp"
#include "edh/pipeline.hpp"
#include "edh/transient.hpp"

#include <benchmark/benchmark.h>

namespace {

std::vector<edh::PixelJob> make_jobs(std::size_t repeats)
{
  const edh::Scene scene = edh::make_scene("staircase:n=10,zmin=1.5,zmax=13.5,rows=4",
                                           edh::SimConfig{}.z_max(), 1.0, 1.0);
  std::vector<edh::PixelJob> jobs;
  for (std::size_t r = 0; r < repeats; ++r)
    for (std::size_t i = 0; i < scene.num_pixels(); ++i)
      jobs.push_back({scene.pixel(i), edh::derive_seed(7, {r, i})});
  return jobs;
}

edh::PipelineOptions options()
{
  edh::PipelineOptions o;
  o.methods = {edh::Method::oedh, edh::Method::pedh, edh::Method::ewh32};
  o.estimators = {edh::EstimatorKind::t0, edh::EstimatorKind::t1,
                  edh::EstimatorKind::ewh_peak};
  return o;
}

void BM_PixelsSerial(benchmark::State& state)
{
  const auto jobs = make_jobs(static_cast<std::size_t>(state.range(0)));
  const auto opts = options();
  for (auto _ : state)
    benchmark::DoNotOptimize(edh::run_pixels_serial(jobs, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(jobs.size()));
}

void BM_PixelsOmp(benchmark::State& state)
{
  const auto jobs = make_jobs(static_cast<std::size_t>(state.range(0)));
  const auto opts = options();
  for (auto _ : state)
    benchmark::DoNotOptimize(edh::run_pixels_omp(jobs, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(jobs.size()));
}

void BM_PedhOnly(benchmark::State& state)
{
  edh::PixelConfig pixel{7.5, 1.0, static_cast<double>(state.range(0))};
  const edh::SimConfig sim;
  const auto stream = edh::sample_stream(edh::build_transient(pixel, sim), sim.cycles, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(edh::pedh(stream, 32, edh::StepParams{}));
}

}  // namespace

BENCHMARK(BM_PixelsSerial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PixelsOmp)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PedhOnly)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
