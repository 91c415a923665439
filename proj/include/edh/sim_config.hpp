#pragma once

#include <cstdint>

namespace edh {

/// Global sensor constants shared by every pixel.
struct SimConfig
{
  std::uint32_t num_bins = 1024;    // B
  double period_s = 100e-9;         // laser repetition period T_r
  double fwhm_s = 0.32e-9;          // pulse full width at half maximum
  std::uint32_t cycles = 5000;      // laser cycles per exposure (L)
  double light_speed = 2.998e8;     // m/s

  double bin_width_s() const { return period_s / num_bins; }
  /// Unambiguous range c*T_r/2.
  double z_max() const { return light_speed * period_s / 2.0; }
  /// Pulse standard deviation expressed in bins.
  double sigma_bins() const;
  /// Round-trip time of a return at distance `z`, in bin units.
  double distance_to_bins(double z) const;

  /// Throws InvalidParams when an invariant is violated.
  void validate() const;
};

}  // namespace edh
