#include "edh/binner.hpp"

#include "edh/errors.hpp"

#include <algorithm>
#include <cmath>

namespace edh {

void StepParams::validate(std::optional<std::uint32_t> cycles) const
{
  if (!(k_pct > 0.0))
    throw InvalidParams("k_pct must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw InvalidParams("gamma must lie in (0, 1]");
  if (!(beta1 >= 0.0 && beta1 < 1.0))
    throw InvalidParams("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0))
    throw InvalidParams("beta2 must lie in [0, 1)");
  if (clip && !(*clip > 0.0))
    throw InvalidParams("clip must be positive when enabled");
  if (cycles && decay_freeze_cycle > *cycles)
    throw InvalidParams("decay_freeze_cycle exceeds the cycle count");
}

double StepParams::decay(std::uint32_t n) const
{
  return std::pow(gamma, static_cast<double>(std::min(n, decay_freeze_cycle)));
}

BinnerState make_binner(double target_frac, double num_bins,
                        const StepParams& params)
{
  if (!(target_frac > 0.0 && target_frac < 1.0))
    throw InvalidParams("target fraction must lie in (0, 1)");
  if (!(num_bins > 0.0))
    throw InvalidParams("bin count must be positive");
  BinnerState s;
  s.target_frac = target_frac;
  s.cv = target_frac * num_bins;
  s.params = params;
  s.num_bins = num_bins;
  s.lo = 0.0;
  s.hi = num_bins;
  return s;
}

BinnerState make_confined_binner(double target_frac, double num_bins, double lo,
                                 double hi, const StepParams& params)
{
  BinnerState s = make_binner(target_frac, num_bins, params);
  if (!(0.0 <= lo && lo <= hi && hi <= num_bins))
    throw InvalidParams("confinement interval must lie inside [0, B]");
  s.lo = lo;
  s.hi = hi;
  s.cv = 0.5 * (lo + hi);
  return s;
}

double delta(double target_frac, CycleObservation obs)
{
  const std::uint32_t total = obs.early + obs.late;
  if (total == 0)
    return 0.0;
  return target_frac - static_cast<double>(obs.early) / total;
}

CycleObservation observe(double cv, std::span<const double> sorted_cycle)
{
  const auto early = std::lower_bound(sorted_cycle.begin(), sorted_cycle.end(), cv) -
                     sorted_cycle.begin();
  return {static_cast<std::uint32_t>(early),
          static_cast<std::uint32_t>(sorted_cycle.size() - early)};
}

CycleObservation observe(double cv, std::span<const double> sorted_cycle,
                         double lo, double hi)
{
  const auto begin = std::lower_bound(sorted_cycle.begin(), sorted_cycle.end(), lo);
  const auto end = std::lower_bound(begin, sorted_cycle.end(), hi);
  const auto mid = std::lower_bound(begin, end, cv);
  return {static_cast<std::uint32_t>(mid - begin),
          static_cast<std::uint32_t>(end - mid)};
}

BinnerState optimized_step(const BinnerState& state, CycleObservation obs)
{
  const StepParams& p = state.params;
  const double d = delta(state.target_frac, obs);
  const double d_tilde = p.beta1 * state.delta_tilde_prev + (1.0 - p.beta1) * d;
  double step = p.beta2 * state.s_prev +
                (1.0 - p.beta2) * (p.k_pct / 100.0) * state.num_bins *
                  p.decay(state.n) * d_tilde;
  if (p.clip) {
    const double bound = *p.clip * state.num_bins;
    step = std::clamp(step, -bound, bound);
  }

  BinnerState next = state;
  next.delta_tilde_prev = d_tilde;
  next.s_prev = step;
  next.cv = std::clamp(state.cv + step, state.lo, state.hi);
  ++next.n;
  return next;
}

BinnerState fixed_step(const BinnerState& state, CycleObservation obs,
                       double step_size)
{
  if (!(step_size > 0.0))
    throw InvalidParams("fixed step size must be positive");
  const double d = delta(state.target_frac, obs);
  const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  BinnerState next = state;
  next.cv = std::clamp(state.cv + step_size * sign, state.lo, state.hi);
  ++next.n;
  return next;
}

}  // namespace edh
