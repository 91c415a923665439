#include "edh/binner.hpp"
#include "edh/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace edh;

namespace {

StepParams basic(double k_pct)
{
  StepParams p;
  p.k_pct = k_pct;
  p.gamma = 1.0;
  p.beta1 = 0.0;
  p.beta2 = 0.0;
  return p;
}

}  // namespace

TEST(Delta, HandValues)
{
  EXPECT_DOUBLE_EQ(delta(0.5, {3, 1}), -0.25);
  EXPECT_DOUBLE_EQ(delta(0.5, {2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(delta(0.25, {0, 4}), 0.25);
  EXPECT_DOUBLE_EQ(delta(0.25, {0, 0}), 0.0);
}

TEST(Delta, BoundedByLargerTargetSide)
{
  for (double target : {0.03125, 0.25, 0.5, 0.75, 0.96875})
    for (std::uint32_t e = 0; e <= 12; ++e)
      for (std::uint32_t l = 0; l <= 12; ++l)
        EXPECT_LE(std::abs(delta(target, {e, l})), std::max(target, 1.0 - target));
}

TEST(Observe, CountsAroundControlValue)
{
  const std::vector<double> c{100.2, 600.7};
  EXPECT_EQ(observe(512.0, c), (CycleObservation{1, 1}));
  EXPECT_EQ(observe(512.0, std::span<const double>{}), (CycleObservation{0, 0}));
  EXPECT_EQ(observe(0.0, c), (CycleObservation{0, 2}));
  const std::vector<double> tie{511.0, 512.0, 512.0, 513.0};
  EXPECT_EQ(observe(512.0, tie), (CycleObservation{1, 3}));
}

TEST(Observe, RestrictedToInterval)
{
  const std::vector<double> c{10.0, 300.0, 400.0, 700.0, 900.0};
  EXPECT_EQ(observe(500.0, c, 256.0, 768.0), (CycleObservation{2, 1}));
  EXPECT_EQ(observe(500.0, c, 0.0, 10.0), (CycleObservation{0, 0}));
}

TEST(OptimizedStep, BasicScaledStep)
{
  BinnerState b = make_binner(0.5, 1024, basic(1.0));
  ASSERT_EQ(b.cv, 512.0);
  const BinnerState next = optimized_step(b, {3, 1});
  EXPECT_NEAR(next.cv - 512.0, -2.56, 1e-12);
  EXPECT_EQ(next.n, 1u);
}

TEST(OptimizedStep, FixedPointOnZeroDelta)
{
  const BinnerState b = make_binner(0.5, 1024);
  const BinnerState next = optimized_step(b, {2, 2});
  EXPECT_EQ(next.cv, b.cv);
  EXPECT_EQ(optimized_step(b, {0, 0}).cv, b.cv);
}

TEST(OptimizedStep, FirstStepWithDefaults)
{
  // Hand trace of one update: D~ = 0.05 * 0.5, S = 0.2 * 30.72 * D~.
  const BinnerState b = make_binner(0.5, 1024);
  const BinnerState next = optimized_step(b, {0, 2});
  EXPECT_NEAR(next.delta_tilde_prev, 0.025, 1e-15);
  EXPECT_NEAR(next.s_prev, 0.1536, 1e-12);
  EXPECT_NEAR(next.cv, 512.1536, 1e-9);
}

TEST(OptimizedStep, ScalarTraceMatchesRecursion)
{
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint32_t> cnt(0, 3);
  const StepParams p;
  BinnerState b = make_binner(0.25, 1024, p);
  double cv = 256.0, dt = 0.0, s = 0.0;
  for (std::uint32_t n = 0; n < 6000; ++n) {
    const CycleObservation obs{cnt(rng), cnt(rng)};
    const double tot = obs.early + obs.late;
    const double d = tot == 0 ? 0.0 : 0.25 - obs.early / tot;
    dt = 0.95 * dt + 0.05 * d;
    s = 0.8 * s + 0.2 * 0.03 * 1024 * std::pow(0.99902, std::min(n, 4000u)) * dt;
    cv = std::clamp(cv + s, 0.0, 1024.0);
    b = optimized_step(b, obs);
    ASSERT_NEAR(b.cv, cv, 1e-9) << "cycle " << n;
  }
}

TEST(OptimizedStep, ReducesToBasicProportionalStep)
{
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint32_t> cnt(0, 4);
  BinnerState b = make_binner(0.75, 1024, basic(3.0));
  double cv = b.cv;
  for (int i = 0; i < 2000; ++i) {
    const CycleObservation obs{cnt(rng), cnt(rng)};
    cv = std::clamp(cv + 0.03 * 1024 * delta(0.75, obs), 0.0, 1024.0);
    b = optimized_step(b, obs);
    ASSERT_NEAR(b.cv, cv, 1e-9);
  }
}

TEST(OptimizedStep, ClampsToRange)
{
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint32_t> cnt(0, 5);
  for (double target : {0.03125, 0.5, 0.96875}) {
    StepParams p;
    p.k_pct = 40.0;
    BinnerState b = make_binner(target, 1024, p);
    for (int i = 0; i < 3000; ++i) {
      b = optimized_step(b, {cnt(rng), cnt(rng)});
      ASSERT_GE(b.cv, 0.0);
      ASSERT_LE(b.cv, 1024.0);
    }
    BinnerState all_late = make_binner(target, 1024, p);
    for (int i = 0; i < 500; ++i)
      all_late = optimized_step(all_late, {0, 3});
    EXPECT_EQ(all_late.cv, 1024.0);
  }
}

TEST(OptimizedStep, ClipBoundsStepMagnitude)
{
  StepParams p = basic(50.0);
  p.clip = 0.02;
  BinnerState b = make_binner(0.5, 1024, p);
  const BinnerState next = optimized_step(b, {0, 1});
  EXPECT_NEAR(next.cv - 512.0, 0.02 * 1024, 1e-12);
}

TEST(StepParams, DecayFreezes)
{
  const StepParams p;
  EXPECT_DOUBLE_EQ(p.decay(0), 1.0);
  EXPECT_DOUBLE_EQ(p.decay(100), std::pow(0.99902, 100));
  const double frozen = std::pow(0.99902, 4000);
  EXPECT_DOUBLE_EQ(p.decay(4000), frozen);
  EXPECT_DOUBLE_EQ(p.decay(4001), frozen);
  EXPECT_DOUBLE_EQ(p.decay(100000), frozen);
}

TEST(StepParams, Validation)
{
  EXPECT_NO_THROW(StepParams{}.validate(5000));
  StepParams p;
  p.gamma = 0.0;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = {};
  p.gamma = 1.01;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = {};
  p.beta1 = 1.0;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = {};
  p.beta2 = -0.1;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = {};
  p.k_pct = 0.0;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = {};
  EXPECT_THROW(p.validate(3000), InvalidParams);
}

TEST(FixedStep, MovesByOneInDeltaDirection)
{
  const BinnerState b = make_binner(0.5, 1024);
  EXPECT_EQ(fixed_step(b, {3, 1}, 1.0).cv, 511.0);
  EXPECT_EQ(fixed_step(b, {1, 3}, 1.0).cv, 513.0);
  EXPECT_EQ(fixed_step(b, {2, 2}, 1.0).cv, 512.0);
  BinnerState near_zero = b;
  near_zero.cv = 0.3;
  EXPECT_EQ(fixed_step(near_zero, {3, 1}, 1.0).cv, 0.0);
}

TEST(ConfinedBinner, StartsAtMidpointAndClamps)
{
  BinnerState b = make_confined_binner(0.5, 1024, 256.0, 512.0);
  EXPECT_EQ(b.cv, 384.0);
  for (int i = 0; i < 1000; ++i)
    b = fixed_step(b, {0, 1}, 1.0);
  EXPECT_EQ(b.cv, 512.0);
}

TEST(Convergence, MonotoneWithBasicStep)
{
  const double t = 700.25;
  const std::vector<double> cycle{t};
  BinnerState b = make_binner(0.5, 1024, basic(3.0));
  double prev = std::abs(b.cv - t);
  for (int i = 0; i < 2000; ++i) {
    const BinnerState next = optimized_step(b, observe(b.cv, cycle));
    const double step = std::abs(next.cv - b.cv);
    const double dist = std::abs(next.cv - t);
    if (step < prev)
      EXPECT_LE(dist, prev) << "cycle " << i;
    prev = dist;
    b = next;
  }
  EXPECT_LT(prev, 0.03 * 1024 * 0.5 + 1e-9);
}

TEST(Convergence, DefaultsStayInBandAfterFreeze)
{
  // Momentum keeps a small limit cycle around the point mass.
  for (double t : {40.5, 300.0, 700.25, 1000.0}) {
    const std::vector<double> cycle{t};
    BinnerState b = make_binner(0.5, 1024);
    double worst = 0.0;
    for (int i = 0; i < 12000; ++i) {
      b = optimized_step(b, observe(b.cv, cycle));
      if (i >= 4000)
        worst = std::max(worst, std::abs(b.cv - t));
    }
    EXPECT_LT(worst, 2.0) << t;
  }
}

TEST(Convergence, StationaryMedianTracking)
{
  // Poisson(2) photons per cycle drawn from N(400, 60^2).
  int inside = 0;
  for (int s = 0; s < 100; ++s) {
    std::mt19937_64 rng(1000 + s);
    std::normal_distribution<double> nd(400.0, 60.0);
    std::poisson_distribution<int> pd(2.0);
    BinnerState b = make_binner(0.5, 1024);
    std::vector<double> c;
    for (int n = 0; n < 5000; ++n) {
      c.clear();
      for (int k = pd(rng); k > 0; --k)
        c.push_back(std::clamp(nd(rng), 0.0, 1023.999));
      std::sort(c.begin(), c.end());
      b = optimized_step(b, observe(b.cv, c));
    }
    inside += std::abs(b.cv - 400.0) <= 10.0;
  }
  EXPECT_GE(inside, 95);
}

TEST(BinnerState, FixedSize)
{
  static_assert(std::is_trivially_copyable_v<BinnerState>);
  EXPECT_LE(sizeof(BinnerState), 128u);
}
