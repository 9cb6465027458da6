#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lvwave/analyze.hpp"
#include "lvwave/solve.hpp"

using namespace lvwave;

namespace {
const SystemParams kBase{1, 0.5, 0.5, 1};

SystemParams example(int n) { return {1, (n - 1.0) / n, 0.5, 1}; }

SelectionKnobs tuned_knobs() {
  SelectionKnobs k;
  k.mu2 = 1 + 1 / 1.1;
  k.q2 = 2.6;
  return k;
}

Profile synthetic(double (*u)(double), double (*v)(double)) {
  Profile p;
  p.converged = true;
  p.params = kBase;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -20 + 0.01 * i;
    p.xi.push_back(x);
    p.u.push_back(u(x));
    p.v.push_back(v(x));
  }
  return p;
}

double sig(double x) { return 0.5 * (1 + std::tanh(x)); }
double sig_half(double x) { return 0.3 * (1 + std::tanh(x / 2)); }
double overshoot(double x) { return sig_half(x) + 0.4 * std::exp(-x * x); }
double wiggle(double x) { return sig(x) + (x > 5 ? 0.05 * std::sin(3 * x) * std::exp(-(x - 5) / 40) : 0.0); }
}  // namespace

TEST(Condition, TunedFmaxAndThreshold) {
  const auto c = nonmonotone_condition_v(example(26), 4.5, tuned_knobs());
  EXPECT_NEAR(c.fmax, 0.0817, 5e-4);
  EXPECT_NEAR(c.target, 2.0 / 27, 1e-14);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(nonmonotone_threshold_n(c.fmax), 24);
  EXPECT_FALSE(nonmonotone_condition_v(example(23), 4.5, tuned_knobs()).holds);
  EXPECT_TRUE(nonmonotone_condition_v(example(24), 4.5, tuned_knobs()).holds);
}

TEST(Condition, ThresholdArithmetic) {
  EXPECT_EQ(nonmonotone_threshold_n(0.0817), 24);
  EXPECT_EQ(nonmonotone_threshold_n(2.0 / 25), 25);  // 2/(n+1) < fmax is strict
  EXPECT_EQ(nonmonotone_threshold_n(0.5), 4);
  EXPECT_THROW(nonmonotone_threshold_n(0), Error);
}

TEST(Condition, UHoldsNearCriticalCompetition) {
  const auto far = nonmonotone_condition_u(kBase, 4.5);
  EXPECT_FALSE(far.holds);
  EXPECT_LT(far.fmax, far.target);
  const double c_star = empirical_c_threshold(1, 0.5, far.fmax);
  EXPECT_GT(c_star, 0.5);
  EXPECT_LT(c_star, 1.0);
  const SystemParams near{1, 0.5, 0.5 * (c_star + 1), 1};
  const auto c = nonmonotone_condition_u(near, 4.5);
  EXPECT_TRUE(c.holds);
  // the lower-envelope maximum does not depend on c once q1 = 2/D1 is admissible
  EXPECT_NEAR(c.fmax, far.fmax, 1e-14);
}

TEST(Condition, EmpiricalThresholdsInvert) {
  const double f = 0.05;
  const double c = empirical_c_threshold(1, 0.5, f);
  EXPECT_NEAR((1 - c) / (1 - 0.5 * c), f, 1e-14);
  const double b = empirical_b_threshold(1, 0.5, f);
  EXPECT_NEAR((1 - b) / (1 - 0.5 * b), f, 1e-14);
}

TEST(Condition, CriticalUsesGBump) {
  const auto c = nonmonotone_condition_u(kBase, 2.0);
  const auto env = construct_envelopes(kBase, 2.0);
  double scan = 0;
  for (double x = -200; x < 0; x += 1e-3) scan = std::max(scan, env.u_lower.value(x));
  EXPECT_NEAR(c.fmax, scan, 1e-6 * scan);
  EXPECT_FALSE(c.holds);
}

TEST(Classify, Synthetic) {
  EXPECT_EQ(classify(synthetic(sig, sig_half)).tag, Shape::MonotoneBoth);
  const auto c = classify(synthetic(sig, overshoot));
  EXPECT_EQ(c.tag, Shape::NonMonotoneV);
  ASSERT_FALSE(c.extrema.empty());
  EXPECT_EQ(c.extrema.front().component, 1);
  EXPECT_TRUE(c.extrema.front().maximum);
  EXPECT_EQ(classify(synthetic(overshoot, overshoot)).tag, Shape::NonMonotoneBoth);
  EXPECT_EQ(classify(synthetic(wiggle, sig_half)).tag, Shape::NonMonotoneU);
}

TEST(Classify, RippleBelowProminenceIgnored) {
  auto p = synthetic(sig, sig_half);
  for (std::size_t i = 0; i < p.size(); ++i) p.v[i] += 1e-6 * std::sin(7 * p.xi[i]);
  EXPECT_EQ(classify(p).tag, Shape::MonotoneBoth);
}

TEST(Classify, RequiresConvergence) {
  auto p = synthetic(sig, sig_half);
  p.converged = false;
  try {
    classify(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "classify requires converged profile");
  }
}

TEST(InteriorBox, VacuousAndForcedFailure) {
  auto over = synthetic(sig, overshoot);
  over.params = kBase;
  EXPECT_TRUE(interior_box_implies_monotone(over, kBase).vacuous);
  EXPECT_TRUE(interior_box_implies_monotone(over, kBase).pass);
  // a bump that stays inside (0,u*)x(0,v*) must be flagged
  auto bad = synthetic(sig, sig_half);
  for (std::size_t i = 0; i < bad.size(); ++i) {
    bad.u[i] = 0.001 + 0.6 * sig(bad.xi[i]) + 0.02 * std::exp(-(bad.xi[i] + 5) * (bad.xi[i] + 5));
    bad.v[i] = 0.001 + 0.6 * sig_half(bad.xi[i]);
  }
  const auto r = interior_box_implies_monotone(bad, kBase);
  EXPECT_FALSE(r.vacuous);
  EXPECT_FALSE(r.pass);
}

TEST(Oscillation, CouplingFlags) {
  EXPECT_TRUE(oscillation_coupling(synthetic(sig, sig_half)).check.pass);
  const auto o = oscillation_coupling(synthetic(wiggle, sig_half));
  EXPECT_TRUE(o.u_oscillates);
  EXPECT_FALSE(o.v_oscillates);
  EXPECT_FALSE(o.check.pass);
  EXPECT_TRUE(oscillation_coupling(synthetic(wiggle, wiggle)).check.pass);
}

TEST(Ma, DefaultEnvelopesExceedTheBox) {
  const auto env = construct_envelopes(kBase, 4.5);
  const auto m = ma_front_criterion(env, kBase);
  EXPECT_FALSE(m.bounds);
  EXPECT_FALSE(m.holds);
}

TEST(Ma, ScaledEnvelopesAgainstBruteForce) {
  auto env = construct_envelopes(kBase, 4.5);
  const Point e = coexistence_state(kBase);
  env.u_upper = env.u_upper.scaled(e.u);
  env.u_lower = env.u_lower.scaled(e.u);
  env.v_upper = env.v_upper.scaled(e.v / kBase.a);
  env.v_lower = env.v_lower.scaled(e.v / kBase.a);
  const auto m = ma_front_criterion(env, kBase);
  EXPECT_TRUE(m.bounds);
  bool brute = true;
  double run = 0;
  for (double x = -80; x < 30; x += 1e-3) {
    run = std::max(run, env.u_lower.value(x));
    brute = brute && run <= env.u_upper.value(x) + 1e-12;
  }
  EXPECT_EQ(m.running_sup, brute);
}

TEST(Scan, RegionAndDeterminism) {
  const SystemParams base{1, 0.5, 0.5, 1};
  const std::vector<double> s{3.0, 4.5, 6.0}, gaps{1.0 / 27, 0.2, 0.6};
  const auto r = scan_region(base, s, gaps);
  EXPECT_TRUE(r.cells[1][0].holds);
  EXPECT_FALSE(r.cells[1][2].holds);
  const auto again = scan_region(base, s, gaps, {}, ScanAxis::Gap, 1);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < gaps.size(); ++j) {
      EXPECT_EQ(r.cells[i][j].holds, again.cells[i][j].holds);
      EXPECT_EQ(r.cells[i][j].fmax, again.cells[i][j].fmax);
    }
  EXPECT_THROW(scan_region(base, s, {1.0}), Error);
}

TEST(Scan, MonotoneAlongC) {
  const SystemParams base{1, 0.5, 0.5, 1};
  std::vector<double> cs;
  for (double c = 0.6; c < 0.999; c += 0.02) cs.push_back(c);
  const auto r = scan_region(base, {3.0, 4.5}, cs, {}, ScanAxis::C);
  for (const auto& row : r.cells) {
    bool seen = false;
    for (const auto& cell : row) {
      if (seen) {
        EXPECT_TRUE(cell.holds);
      }
      seen = seen || cell.holds;
    }
    EXPECT_TRUE(seen);
  }
}

TEST(Sturm, ClosedForm) {
  const auto r = sturm_interval({1, 0.5, 0.5, 1}, 1.0, 0.5, 10.0);
  const double w = std::numbers::pi / std::sqrt(0.5);
  EXPECT_EQ(r.M, 2);
  EXPECT_NEAR(r.xi1, -4 * w, 1e-9);
  EXPECT_NEAR(r.xi2, -3 * w, 1e-9);
  EXPECT_NEAR(r.xi1, -17.7715, 1e-4);
  EXPECT_NEAR(r.xi2, -13.3286, 1e-4);
  EXPECT_FALSE(r.psi_min.has_value());
}

TEST(Sturm, Guards) {
  EXPECT_THROW(sturm_interval(kBase, 1.0, 0.8, 10), Error);
  try {
    sturm_interval(kBase, 2.0, 0.1, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "diagnostic applies to subcritical speeds only");
  }
}

TEST(Sturm, PsiOnProfile) {
  Profile p;
  for (int i = 0; i <= 400; ++i) {
    p.xi.push_back(-40 + 0.1 * i);
    p.u.push_back(0.01);
    p.v.push_back(0.02);
  }
  const auto r = sturm_interval(kBase, 1.0, 0.5, 10, &p);
  ASSERT_TRUE(r.psi_min.has_value());
  EXPECT_NEAR(*r.psi_min, 0.75 - 0.01 - 0.5 * 0.02, 1e-14);
  EXPECT_TRUE(*r.psi_above_eps);
}

TEST(Profiles, ExampleIsNonMonotoneV) {
  OperatorConfig cfg;
  cfg.h = 0.05;
  cfg.right = 600;
  SelectionKnobs k;
  k.mode = Mode::NonMonotoneV;
  const auto r = iterate(construct_envelopes(example(26), 4.5, k), cfg);
  ASSERT_TRUE(r.report.converged) << r.report.message;
  EXPECT_EQ(classify(r.profile).tag, Shape::NonMonotoneV);
  EXPECT_TRUE(interior_box_implies_monotone(r.profile, example(26)).pass);
  EXPECT_TRUE(oscillation_coupling(r.profile).check.pass);
}

TEST(Profiles, MonotoneFrontPassesAlarms) {
  const auto r = iterate(construct_envelopes(kBase, 4.5));
  ASSERT_TRUE(r.report.converged);
  const auto c = classify(r.profile);
  const auto box = interior_box_implies_monotone(r.profile, kBase);
  EXPECT_TRUE(box.pass);
  if (!box.vacuous) {
    EXPECT_EQ(c.tag, Shape::MonotoneBoth);
  }
  EXPECT_TRUE(oscillation_coupling(r.profile).check.pass);
}
