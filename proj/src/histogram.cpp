#include "edh/histogram.hpp"

#include "edh/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace edh {

void EdhBoundaries::validate() const
{
  if (q < 1 || bounds.size() != q + 1)
    throw InvalidParams("boundary set must hold q + 1 values");
  if (bounds.front() != 0.0 || bounds.back() != num_bins)
    throw InvalidParams("boundary endpoints must be 0 and B");
  if (!std::is_sorted(bounds.begin(), bounds.end()))
    throw InvalidParams("boundaries must be non-decreasing");
}

EdhBoundaries EdhBoundaries::from_interior(std::vector<double> interior,
                                           double num_bins)
{
  std::sort(interior.begin(), interior.end());
  EdhBoundaries b;
  b.q = interior.size() + 1;
  b.num_bins = num_bins;
  b.bounds.reserve(b.q + 1);
  b.bounds.push_back(0.0);
  for (double v : interior)
    b.bounds.push_back(std::clamp(v, 0.0, num_bins));
  b.bounds.push_back(num_bins);
  return b;
}

std::uint64_t EwHistogram::total() const
{
  return std::accumulate(bins.begin(), bins.end(), std::uint64_t{0});
}

EdhBoundaries oedh(std::span<const double> timestamps, std::size_t q,
                   double num_bins)
{
  if (q < 1)
    throw InvalidParams("q must be at least 1");
  const std::size_t n = timestamps.size();
  if (n < q)
    throw TooFewPhotons("stream has " + std::to_string(n) +
                        " photons, need at least q = " + std::to_string(q));
  std::vector<double> sorted(timestamps.begin(), timestamps.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> interior;
  interior.reserve(q - 1);
  for (std::size_t j = 1; j < q; ++j) {
    const std::size_t rank = (j * n + q - 1) / q;  // ceil(j n / q), >= 1
    interior.push_back(sorted[rank - 1]);
  }
  return EdhBoundaries::from_interior(std::move(interior), num_bins);
}

EdhBoundaries oedh(const PhotonStream& stream, std::size_t q)
{
  return oedh(stream.pooled(), q, stream.num_bins());
}

BinnerState track_quantile(const PhotonStream& stream, double target_frac,
                           const StepParams& params)
{
  BinnerState s = make_binner(target_frac, stream.num_bins(), params);
  for (std::size_t c = 0; c < stream.num_cycles(); ++c)
    s = optimized_step(s, observe(s.cv, stream.cycle(c)));
  return s;
}

BinnerState track_quantile_fixed(const PhotonStream& stream, BinnerState state,
                                 double step_size, std::size_t first_cycle,
                                 std::size_t last_cycle)
{
  last_cycle = std::min(last_cycle, stream.num_cycles());
  const bool confined = state.lo > 0.0 || state.hi < state.num_bins;
  for (std::size_t c = first_cycle; c < last_cycle; ++c) {
    const auto cycle = stream.cycle(c);
    const auto obs = confined ? observe(state.cv, cycle, state.lo, state.hi)
                              : observe(state.cv, cycle);
    state = fixed_step(state, obs, step_size);
  }
  return state;
}

ProportionalHistogrammer::ProportionalHistogrammer(std::size_t q, double num_bins,
                                                   const StepParams& params)
  : q_(q), num_bins_(num_bins)
{
  if (q < 2)
    throw InvalidParams("PEDH needs q >= 2");
  params.validate();
  states_.reserve(q - 1);
  for (std::size_t j = 1; j < q; ++j)
    states_.push_back(make_binner(static_cast<double>(j) / q, num_bins, params));
}

void ProportionalHistogrammer::consume_cycle(std::span<const double> sorted_cycle)
{
  for (auto& s : states_)
    s = optimized_step(s, observe(s.cv, sorted_cycle));
}

void ProportionalHistogrammer::consume(const PhotonStream& stream)
{
  for (std::size_t c = 0; c < stream.num_cycles(); ++c)
    consume_cycle(stream.cycle(c));
}

EdhBoundaries ProportionalHistogrammer::boundaries() const
{
  std::vector<double> cvs;
  cvs.reserve(states_.size());
  for (const auto& s : states_)
    cvs.push_back(s.cv);
  return EdhBoundaries::from_interior(std::move(cvs), num_bins_);
}

EdhBoundaries pedh(const PhotonStream& stream, std::size_t q,
                   const StepParams& params)
{
  ProportionalHistogrammer bank(q, stream.num_bins(), params);
  bank.consume(stream);
  return bank.boundaries();
}

EdhBoundaries hedh(const PhotonStream& stream, std::size_t q, double step_size)
{
  if (q < 2 || !std::has_single_bit(q))
    throw QNotPowerOfTwo("HEDH needs q to be a power of two, got " +
                         std::to_string(q));
  if (!(step_size > 0.0))
    throw InvalidParams("fixed step size must be positive");

  const double num_bins = stream.num_bins();
  const auto levels = static_cast<std::size_t>(std::countr_zero(q));
  const std::size_t cycles = stream.num_cycles();
  const std::size_t per_level = cycles / levels;

  // Settled boundaries, kept sorted; starts as the whole axis.
  std::vector<double> edges{0.0, num_bins};
  for (std::size_t level = 0; level < levels; ++level) {
    const std::size_t first = level * per_level;
    const std::size_t last = level + 1 == levels ? cycles : first + per_level;
    std::vector<double> next;
    next.reserve(2 * edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      BinnerState s = make_confined_binner(0.5, num_bins, edges[i], edges[i + 1]);
      s = track_quantile_fixed(stream, s, step_size, first, last);
      next.push_back(edges[i]);
      next.push_back(s.cv);
    }
    next.push_back(num_bins);
    edges = std::move(next);
  }
  edges.erase(edges.begin());
  edges.pop_back();
  return EdhBoundaries::from_interior(std::move(edges), num_bins);
}

EwHistogram ewh(const PhotonStream& stream, std::size_t bin_count)
{
  const double num_bins = stream.num_bins();
  if (bin_count < 1 || static_cast<double>(bin_count) > num_bins)
    throw InvalidBinCount("EW bin count must lie in [1, B], got " +
                          std::to_string(bin_count));
  EwHistogram h;
  h.num_bins = num_bins;
  h.bins.assign(bin_count, 0);
  const double scale = static_cast<double>(bin_count) / num_bins;
  for (double t : stream.pooled()) {
    auto idx = static_cast<std::size_t>(t * scale);
    ++h.bins[std::min(idx, bin_count - 1)];
  }
  return h;
}

std::vector<double> ewh_expected(const Transient& transient, std::size_t bin_count)
{
  const std::size_t fine = transient.values.size();
  if (bin_count < 1 || bin_count > fine)
    throw InvalidBinCount("EW bin count must lie in [1, B], got " +
                          std::to_string(bin_count));
  std::vector<double> out(bin_count, 0.0);
  for (std::size_t k = 0; k < fine; ++k)
    out[k * bin_count / fine] += transient.values[k];
  return out;
}

}  // namespace edh
