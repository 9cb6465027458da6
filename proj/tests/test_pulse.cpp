#include <gtest/gtest.h>

#include <cmath>

#include "lvwave/pulse.hpp"

using namespace lvwave;

namespace {
const SystemParams kStart{1, 0.5, 0.9, 1};
}  // namespace

TEST(Plan, GeometricScheduleTowardOneOverA) {
  const auto plan = plan_continuation(kStart, 2.5, PulseTarget::CToOneOverA, 8);
  ASSERT_EQ(plan.steps.size(), 8u);
  EXPECT_DOUBLE_EQ(plan.steps.front(), 0.9);
  EXPECT_NEAR(1 - plan.steps.back(), 1e-4, 1e-12);
  EXPECT_NEAR(plan.ratio, std::pow(1e-3, 1.0 / 7), 1e-14);
  for (std::size_t k = 1; k < plan.steps.size(); ++k) {
    EXPECT_GT(plan.steps[k], plan.steps[k - 1]);
    EXPECT_NEAR((1 - plan.steps[k]) / (1 - plan.steps[k - 1]), plan.ratio, 1e-9);
    EXPECT_EQ(classify_regime(step_params(plan, k)), Regime::StrictWeak);
  }
}

TEST(Plan, LongScheduleHalves) {
  const auto plan = plan_continuation(kStart, 2.5, PulseTarget::CToOneOverA, 20);
  EXPECT_DOUBLE_EQ(plan.ratio, 0.5);
  EXPECT_NEAR(plan.steps[1], 0.95, 1e-14);
  EXPECT_NEAR(plan.steps[2], 0.975, 1e-14);
  EXPECT_LE(1 - plan.steps.back(), 1e-4);
}

TEST(Plan, MirroredTarget) {
  const auto plan = plan_continuation({1, 0.5, 0.5, 1}, 2.5, PulseTarget::BToA, 6);
  EXPECT_DOUBLE_EQ(plan.steps.front(), 0.5);
  EXPECT_NEAR(1 - plan.steps.back(), 1e-4, 1e-12);
  EXPECT_EQ(step_params(plan, 3).c, 0.5);
  EXPECT_GT(plan.floor, 0);
  EXPECT_TRUE(plan.knobs.delta1.has_value());
  EXPECT_FALSE(plan.knobs.delta2.has_value());
}

TEST(Plan, SingleStep) {
  const auto plan = plan_continuation(kStart, 2.5, PulseTarget::CToOneOverA, 1);
  ASSERT_EQ(plan.steps.size(), 1u);
  EXPECT_DOUBLE_EQ(plan.steps[0], 0.9);
}

TEST(Plan, Unreachable) {
  EXPECT_THROW(plan_continuation({1, 0.5, 1.0, 1}, 2.5, PulseTarget::CToOneOverA, 4), Error);
  EXPECT_THROW(plan_continuation(kStart, 2.5, PulseTarget::CToOneOverA, 0), Error);
  EXPECT_THROW(plan_continuation(kStart, 1.5, PulseTarget::CToOneOverA, 4), Error);
}

TEST(Plan, FloorIsStepIndependent) {
  const auto plan = plan_continuation(kStart, 2.5, PulseTarget::CToOneOverA, 5);
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const auto env = construct_envelopes(step_params(plan, k), 2.5, plan.knobs);
    EXPECT_NEAR(env.params.lower_max1, plan.floor, 1e-15);
    EXPECT_LE(env.params.delta1, 1 - plan.steps[k]);
  }
}

TEST(Degenerate, Params) {
  const auto p = degenerate_params({2, 0.5, 0.3, 1}, PulseTarget::CToOneOverA);
  EXPECT_DOUBLE_EQ(p.c, 0.5);
  EXPECT_EQ(classify_regime(p), Regime::CriticalWeakC);
  EXPECT_DOUBLE_EQ(degenerate_params({2, 0.5, 0.3, 1}, PulseTarget::BToA).b, 2);
}

TEST(Extrapolate, CancelsLinearTerm) {
  auto make = [](double dist) {
    Profile p;
    for (int i = 0; i < 5; ++i) {
      p.xi.push_back(i);
      p.u.push_back(1 + 3 * dist);
      p.v.push_back(2 - dist);
    }
    return p;
  };
  const double r = 0.3;
  const auto lim = extrapolate_limit({make(1e-2), make(1e-2 * r)}, r);
  EXPECT_NEAR(lim.u[2], 1, 1e-14);
  EXPECT_NEAR(lim.v[2], 2, 1e-14);
}

TEST(TailDiagnostics, Case2BracketViolationFlagged) {
  const SystemParams pdeg{1, 0.5, 1, 1};
  Profile p;
  for (int i = 0; i <= 2000; ++i) {
    const double x = 0.05 * i;
    p.xi.push_back(x);
    p.u.push_back(0.3 * std::exp(-x / 10));
    // companion oscillates around a level where its reaction a - bu - v is negative at maxima
    p.v.push_back(1.2 + 0.05 * std::sin(x));
  }
  const auto r = pulse_tail_diagnostics(p, pdeg, PulseTarget::CToOneOverA);
  EXPECT_EQ(r.kase, TailCase::CompanionOscillates);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.conditions.empty());
}

TEST(TailDiagnostics, MonotoneTailsNeedNoConditions) {
  const SystemParams pdeg{1, 0.5, 1, 1};
  Profile p;
  for (int i = 0; i <= 1000; ++i) {
    const double x = 0.1 * i;
    p.xi.push_back(x);
    p.u.push_back(0.3 * std::exp(-x / 20));
    p.v.push_back(1 - 0.5 * std::exp(-x / 30));
  }
  const auto r = pulse_tail_diagnostics(p, pdeg, PulseTarget::CToOneOverA);
  EXPECT_EQ(r.kase, TailCase::BothMonotone);
  EXPECT_TRUE(r.pass);
}

TEST(Continuation, ShortRunPreservesFloor) {
  OperatorConfig cfg;
  cfg.right = 400;
  auto plan = plan_continuation(kStart, 2.5, PulseTarget::CToOneOverA, 4, cfg);
  plan.compare_cold = true;
  const auto res = run_continuation(plan);
  ASSERT_TRUE(res.completed) << (res.steps.empty() ? "" : res.steps.back().message);
  EXPECT_TRUE(res.floor_preserved);
  for (const auto& st : res.steps) EXPECT_GE(st.pulse_max, res.floor - 1e-8);
  EXPECT_LE(res.steps.back().newton_iterations, res.steps.back().cold_newton_iterations);
  EXPECT_LT(res.tails.pulsed_left, 1e-2);
  EXPECT_LT(res.degenerate_residual, 1e-3);
  const auto d = pulse_tail_diagnostics(res.limit_profile, degenerate_params(kStart, PulseTarget::CToOneOverA),
                                        PulseTarget::CToOneOverA);
  EXPECT_TRUE(d.pass);
}

TEST(Continuation, MirrorVPulse) {
  const auto plan = plan_continuation({1, 0.5, 0.5, 1}, 2.5, PulseTarget::BToA, 4);
  const auto res = run_continuation(plan);
  ASSERT_TRUE(res.completed) << (res.steps.empty() ? "" : res.steps.back().message);
  EXPECT_TRUE(res.floor_preserved);
  EXPECT_LT(res.tails.pulsed_left, 1e-2);
  EXPECT_LT(res.tails.pulsed_right, 1e-2);
  EXPECT_NEAR(res.tails.companion_right, 1.0, 1e-2);
}

TEST(Continuation, FailureIsReportedWithIndex) {
  OperatorConfig cfg;
  cfg.right = 400;
  cfg.newton_max = 0;
  cfg.max_iters = 2;
  cfg.rounds = 1;
  const auto plan = plan_continuation(kStart, 2.5, PulseTarget::CToOneOverA, 3, cfg);
  const auto res = run_continuation(plan);
  ASSERT_TRUE(res.failed_step.has_value());
  EXPECT_EQ(*res.failed_step, 0u);
  EXPECT_FALSE(res.completed);
}
