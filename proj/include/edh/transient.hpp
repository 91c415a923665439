#pragma once

#include "edh/scene.hpp"
#include "edh/sim_config.hpp"

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace edh {

using Rng = std::mt19937_64;

/// Mean photon count per bin per laser cycle.
struct Transient
{
  std::vector<double> values;
  SimConfig config;
  double peak_bins = 0.0;  // round-trip time of the pulse centre, in bins

  double total() const;
};

/// Gaussian pulse binned by CDF differences plus a flat background of
/// phi_bkg_total / B per bin. Pulse mass outside [0, B) is dropped.
Transient build_transient(const PixelConfig& pixel, const SimConfig& cfg);

/// Signal-to-background ratio of per-cycle totals.
double sbr(const PixelConfig& pixel);

/// Photon timestamps of an exposure, grouped by laser cycle. Timestamps are
/// continuous bin positions in [0, B), sorted within each cycle.
class PhotonStream
{
public:
  PhotonStream() = default;
  PhotonStream(std::vector<double> timestamps, std::vector<std::size_t> offsets,
               std::uint32_t num_bins, std::uint64_t seed);

  std::size_t num_cycles() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const double> cycle(std::size_t i) const
  {
    return std::span<const double>(timestamps_).subspan(
      offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  /// Every timestamp in cycle order (not globally sorted).
  std::span<const double> pooled() const { return timestamps_; }
  std::size_t total_photons() const { return timestamps_.size(); }
  std::uint32_t num_bins() const { return num_bins_; }
  std::uint64_t seed() const { return seed_; }

  /// FNV-1a over the timestamp bits and cycle layout.
  std::uint64_t checksum() const;

  /// Debug dump, one "cycle_index,timestamp" line per photon.
  void write_csv(const std::filesystem::path& path) const;

private:
  std::vector<double> timestamps_;
  std::vector<std::size_t> offsets_;
  std::uint32_t num_bins_ = 0;
  std::uint64_t seed_ = 0;
};

/// Draws cycles from a fixed transient. Per-bin Poisson counts are drawn as
/// one Poisson total split multinomially over bins, which has the same joint
/// law and costs O(photons) instead of O(B) per cycle.
class CycleSampler
{
public:
  explicit CycleSampler(const Transient& transient);

  /// Appends one sorted cycle to `out`.
  void sample(Rng& rng, std::vector<double>& out) const;

private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

std::vector<double> sample_cycle(const Transient& transient, Rng& rng);

/// `cycles` independent cycles from Rng(seed); identical inputs give a
/// bit-identical stream.
PhotonStream sample_stream(const Transient& transient, std::uint32_t cycles,
                           std::uint64_t seed);

/// Mixes a global seed with indices (pixel, run, condition, ...) so every
/// pixel owns an independent generator regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t global_seed,
                          std::initializer_list<std::uint64_t> indices);

}  // namespace edh
