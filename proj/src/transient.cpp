#include "edh/transient.hpp"

#include "edh/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

namespace edh {
namespace {

double normal_cdf(double x)
{
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double uniform01(Rng& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double SimConfig::sigma_bins() const
{
  return fwhm_s / (2.0 * std::sqrt(2.0 * std::numbers::ln2)) / bin_width_s();
}

double SimConfig::distance_to_bins(double z) const
{
  return 2.0 * z / light_speed / bin_width_s();
}

void SimConfig::validate() const
{
  if (num_bins < 2)
    throw InvalidParams("bin count must be at least 2");
  if (!(period_s > 0.0))
    throw InvalidParams("laser period must be positive");
  if (!(fwhm_s > 0.0) || !(fwhm_s < period_s))
    throw InvalidParams("pulse FWHM must lie in (0, period)");
  if (cycles < 1)
    throw InvalidParams("cycle count must be at least 1");
  if (!(light_speed > 0.0))
    throw InvalidParams("speed of light must be positive");
}

double Transient::total() const
{
  return std::accumulate(values.begin(), values.end(), 0.0);
}

Transient build_transient(const PixelConfig& pixel, const SimConfig& cfg)
{
  cfg.validate();
  pixel.validate();
  const double round_trip = 2.0 * pixel.z / cfg.light_speed;
  if (!(pixel.z >= 0.0) || !(round_trip < cfg.period_s))
    throw DistanceExceedsRange("distance " + std::to_string(pixel.z) +
                               " m exceeds unambiguous range " +
                               std::to_string(cfg.z_max()) + " m");

  Transient t;
  t.config = cfg;
  t.peak_bins = cfg.distance_to_bins(pixel.z);
  const double sigma = cfg.sigma_bins();
  const double bkg = pixel.phi_bkg_total / cfg.num_bins;

  t.values.resize(cfg.num_bins);
  double lower = normal_cdf((0.0 - t.peak_bins) / sigma);
  for (std::uint32_t k = 0; k < cfg.num_bins; ++k) {
    const double upper = normal_cdf((k + 1.0 - t.peak_bins) / sigma);
    t.values[k] = pixel.phi_sig_total * (upper - lower) + bkg;
    lower = upper;
  }
  return t;
}

double sbr(const PixelConfig& pixel)
{
  if (!(pixel.phi_bkg_total > 0.0))
    throw ZeroBackground("SBR undefined without background photons");
  return pixel.phi_sig_total / pixel.phi_bkg_total;
}

PhotonStream::PhotonStream(std::vector<double> timestamps,
                           std::vector<std::size_t> offsets,
                           std::uint32_t num_bins, std::uint64_t seed)
  : timestamps_(std::move(timestamps)), offsets_(std::move(offsets)),
    num_bins_(num_bins), seed_(seed)
{
  if (offsets_.empty() || offsets_.front() != 0 ||
      offsets_.back() != timestamps_.size() ||
      !std::is_sorted(offsets_.begin(), offsets_.end()))
    throw InvalidParams("malformed cycle offsets");
}

std::uint64_t PhotonStream::checksum() const
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  for (std::size_t o : offsets_)
    mix(o);
  for (double t : timestamps_)
    mix(std::bit_cast<std::uint64_t>(t));
  return h;
}

void PhotonStream::write_csv(const std::filesystem::path& path) const
{
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "cycle_index,timestamp\n";
  for (std::size_t c = 0; c < num_cycles(); ++c)
    for (double t : cycle(c))
      out << c << ',' << t << '\n';
}

CycleSampler::CycleSampler(const Transient& transient)
  : cumulative_(transient.values.size())
{
  for (double v : transient.values)
    if (!(v >= 0.0))
      throw InvalidParams("transient values must be non-negative");
  std::partial_sum(transient.values.begin(), transient.values.end(),
                   cumulative_.begin());
  total_ = cumulative_.empty() ? 0.0 : cumulative_.back();
}

void CycleSampler::sample(Rng& rng, std::vector<double>& out) const
{
  if (!(total_ > 0.0))
    return;
  std::poisson_distribution<long> count_dist(total_);
  const long n = count_dist(rng);
  const auto first = out.size();
  const auto last_bin = static_cast<std::ptrdiff_t>(cumulative_.size()) - 1;
  for (long i = 0; i < n; ++i) {
    const double x = uniform01(rng) * total_;
    auto k = std::upper_bound(cumulative_.begin(), cumulative_.end(), x) -
             cumulative_.begin();
    k = std::min(k, last_bin);
    const double bin = static_cast<double>(k);
    double t = bin + uniform01(rng);
    if (t >= bin + 1.0)
      t = std::nextafter(bin + 1.0, 0.0);
    out.push_back(t);
  }
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

std::vector<double> sample_cycle(const Transient& transient, Rng& rng)
{
  std::vector<double> out;
  CycleSampler(transient).sample(rng, out);
  return out;
}

PhotonStream sample_stream(const Transient& transient, std::uint32_t cycles,
                           std::uint64_t seed)
{
  if (cycles < 1)
    throw InvalidParams("an exposure needs at least one laser cycle");
  const CycleSampler sampler(transient);
  Rng rng(seed);
  std::vector<double> timestamps;
  timestamps.reserve(static_cast<std::size_t>(cycles * (transient.total() + 1.0)));
  std::vector<std::size_t> offsets;
  offsets.reserve(cycles + 1);
  offsets.push_back(0);
  for (std::uint32_t c = 0; c < cycles; ++c) {
    sampler.sample(rng, timestamps);
    offsets.push_back(timestamps.size());
  }
  return PhotonStream(std::move(timestamps), std::move(offsets),
                      transient.config.num_bins, seed);
}

std::uint64_t derive_seed(std::uint64_t global_seed,
                          std::initializer_list<std::uint64_t> indices)
{
  std::uint64_t h = splitmix64(global_seed);
  for (std::uint64_t i : indices)
    h = splitmix64(h ^ splitmix64(i + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace edh
