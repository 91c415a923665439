#pragma once

#include "edh/binner.hpp"
#include "edh/transient.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace edh {

/// Sorted equi-depth bin boundaries {t_0 = 0, ..., t_q = B}.
struct EdhBoundaries
{
  std::size_t q = 0;
  std::vector<double> bounds;
  double num_bins = 1024.0;

  std::span<const double> interior() const
  {
    return std::span<const double>(bounds).subspan(1, q - 1);
  }
  /// Throws InvalidParams if the endpoints, length or ordering are off.
  void validate() const;

  /// Sorts the interior values and attaches the forced endpoints.
  static EdhBoundaries from_interior(std::vector<double> interior, double num_bins);

  friend bool operator==(const EdhBoundaries&, const EdhBoundaries&) = default;
};

/// Photon counts per equal-width bin.
struct EwHistogram
{
  std::vector<std::uint64_t> bins;
  double num_bins = 1024.0;  // width of the time axis in fine bins

  std::size_t bin_count() const { return bins.size(); }
  std::uint64_t total() const;
};

/// Exact empirical quantiles of the pooled stream: t_j is the smallest
/// timestamp where the empirical CDF reaches j/q, i.e. the order statistic
/// of rank ceil(j N / q). Throws TooFewPhotons when N < q.
EdhBoundaries oedh(const PhotonStream& stream, std::size_t q);
EdhBoundaries oedh(std::span<const double> timestamps, std::size_t q,
                   double num_bins);

/// Runs one optimized binner over every cycle of the stream.
BinnerState track_quantile(const PhotonStream& stream, double target_frac,
                           const StepParams& params);

/// Runs one fixed-step binner over cycles [first_cycle, last_cycle).
BinnerState track_quantile_fixed(const PhotonStream& stream, BinnerState state,
                                 double step_size, std::size_t first_cycle,
                                 std::size_t last_cycle);

/// Bank of q-1 optimized binners tracking j/q, all fed every cycle.
class ProportionalHistogrammer
{
public:
  ProportionalHistogrammer(std::size_t q, double num_bins, const StepParams& params);

  void consume_cycle(std::span<const double> sorted_cycle);
  void consume(const PhotonStream& stream);

  /// Final control values, sorted when binners have crossed.
  EdhBoundaries boundaries() const;
  std::span<const BinnerState> states() const { return states_; }
  /// Bytes of binner state; independent of how many photons were consumed.
  std::size_t state_bytes() const { return states_.size() * sizeof(BinnerState); }

private:
  std::size_t q_;
  double num_bins_;
  std::vector<BinnerState> states_;
};

EdhBoundaries pedh(const PhotonStream& stream, std::size_t q,
                   const StepParams& params);

/// Hierarchical tree of fixed-step median binners. The cycles are split
/// evenly across the log2(q) levels (the last level takes the remainder);
/// level l runs 2^(l-1) binners, each confined to the interval between
/// boundaries settled by the levels above and ignoring photons outside it.
EdhBoundaries hedh(const PhotonStream& stream, std::size_t q, double step_size);

/// Throws InvalidBinCount unless 1 <= bin_count <= B.
EwHistogram ewh(const PhotonStream& stream, std::size_t bin_count);

/// Expected (noiseless) per-cycle counts of the transient pooled into
/// bin_count equal-width bins.
std::vector<double> ewh_expected(const Transient& transient, std::size_t bin_count);

}  // namespace edh
