#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace edh {

/// Schedule constants of the optimized proportional step.
///
/// The step applied after cycle n is
///
///   D~_n = beta1 * D~_{n-1} + (1 - beta1) * D_n
///   S_n  = beta2 * S_{n-1}  + (1 - beta2) * (k_pct / 100) * B * gamma^m * D~_n
///
/// with m = min(n, decay_freeze_cycle) and D_n the proportional delta.
/// With beta1 = beta2 = 0 and gamma = 1 this is the plain scaled step
/// S_n = (k_pct / 100) * B * D_n.
struct StepParams
{
  double k_pct = 3.0;
  double gamma = 0.99902;
  double beta1 = 0.95;
  double beta2 = 0.8;
  std::uint32_t decay_freeze_cycle = 4000;
  /// Optional bound on |S_n| as a fraction of B.
  std::optional<double> clip;

  /// Throws InvalidParams. `cycles`, when given, also bounds the freeze cycle.
  void validate(std::optional<std::uint32_t> cycles = std::nullopt) const;

  double decay(std::uint32_t n) const;

  friend bool operator==(const StepParams&, const StepParams&) = default;
};

/// Photons before / at-or-after the control value in one cycle.
struct CycleObservation
{
  std::uint32_t early = 0;
  std::uint32_t late = 0;

  friend bool operator==(const CycleObservation&, const CycleObservation&) = default;
};

/// Fixed-memory state of one quantile-tracking binner. A binner never keeps
/// photon history, only these scalars.
struct BinnerState
{
  double cv = 0.0;
  double target_frac = 0.5;
  double s_prev = 0.0;
  double delta_tilde_prev = 0.0;
  std::uint32_t n = 0;
  StepParams params;
  double num_bins = 1024.0;
  // Clamp range for the control value. [0, B] unless the binner is confined
  // to a sub-interval (hierarchical histogrammer).
  double lo = 0.0;
  double hi = 1024.0;

  friend bool operator==(const BinnerState&, const BinnerState&) = default;
};

/// Binner tracking quantile `target_frac` over [0, num_bins]. The control
/// value starts at target_frac * num_bins, the answer for a flat transient.
BinnerState make_binner(double target_frac, double num_bins,
                        const StepParams& params = {});

/// Binner confined to [lo, hi), starting at the interval midpoint.
BinnerState make_confined_binner(double target_frac, double num_bins, double lo,
                                 double hi, const StepParams& params = {});

/// target_frac - early / (early + late), or 0 for an empty cycle.
double delta(double target_frac, CycleObservation obs);

/// Counts photons of a sorted cycle on either side of `cv`. A photon exactly
/// at cv counts as late.
CycleObservation observe(double cv, std::span<const double> sorted_cycle);

/// Same, restricted to photons in [lo, hi).
CycleObservation observe(double cv, std::span<const double> sorted_cycle,
                         double lo, double hi);

BinnerState optimized_step(const BinnerState& state, CycleObservation obs);

/// Moves the control value by step_size * sign(delta).
BinnerState fixed_step(const BinnerState& state, CycleObservation obs,
                       double step_size);

}  // namespace edh
