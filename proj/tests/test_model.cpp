#include <gtest/gtest.h>

#include <cmath>

#include "lvwave/model.hpp"

using namespace lvwave;

TEST(Regime, Classification) {
  EXPECT_EQ(classify_regime({1, 0.5, 0.5, 1}), Regime::StrictWeak);
  EXPECT_EQ(classify_regime({1, 0.5, 1, 1}), Regime::CriticalWeakC);
  EXPECT_EQ(classify_regime({1, 1, 0.5, 1}), Regime::CriticalWeakB);
  EXPECT_EQ(classify_regime({1, 1, 1, 1}), Regime::OutOfScope);
  EXPECT_EQ(classify_regime({1, 2, 0.5, 1}), Regime::OutOfScope);
  EXPECT_EQ(classify_regime({1, 0.5, 2, 1}), Regime::OutOfScope);
  EXPECT_EQ(classify_regime({1, 0.5, 1 + 1e-13, 1}), Regime::CriticalWeakC);
}

TEST(Regime, ExhaustiveOnGrid) {
  int counts[4] = {0, 0, 0, 0};
  for (double a : {0.25, 1.0, 3.0})
    for (double b : {0.1, 0.25, 1.0, 3.0})
      for (double c : {0.1, 1.0 / 3.0, 1.0, 4.0}) counts[static_cast<int>(classify_regime({a, b, c, 1}))]++;
  EXPECT_EQ(counts[0] + counts[1] + counts[2] + counts[3], 48);
  EXPECT_GT(counts[0], 0);
}

TEST(Equilibria, ClosedForm) {
  const auto e = equilibria({1, 1 - 1.0 / 26, 0.5, 1});
  EXPECT_NEAR(e.coexistence->u, 26.0 / 27, 1e-14);
  EXPECT_NEAR(e.coexistence->v, 2.0 / 27, 1e-14);
  const auto f = equilibria({0.8, 0.4, 0.5, 1});
  EXPECT_NEAR(f.coexistence->u, 0.75, 1e-14);
  EXPECT_NEAR(f.coexistence->v, 0.5, 1e-14);
  EXPECT_EQ(*equilibria({1, 1, 0.5, 1}).coexistence, (Point{1, 0}));
  EXPECT_EQ(*equilibria({1, 0.5, 1, 1}).coexistence, (Point{0, 1}));
  EXPECT_EQ(equilibria({0.8, 0.4, 0.5, 1}).semitrivial_v, (Point{0, 0.8}));
}

TEST(Equilibria, OutOfScopeThrows) {
  try {
    equilibria({1, 2, 2, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "unsupported regime");
  }
}

TEST(CriticalSpeed, Formula) {
  EXPECT_DOUBLE_EQ(critical_speed({1, 0.5, 0.5, 1}), 2.0);
  EXPECT_DOUBLE_EQ(critical_speed({4, 0.5, 0.1, 1}), 4.0);
  EXPECT_DOUBLE_EQ(critical_speed({0.5, 0.1, 0.5, 0.5}), 2.0);
  double prev = 0;
  for (double a = 0.1; a < 5; a += 0.1) {
    const double s = critical_speed({a, 0.01, 0.01, 2});
    EXPECT_GE(s, prev);
    prev = s;
  }
}

TEST(DecayRates, ExampleSpeed) {
  const auto r = decay_rates({1, 0.5, 0.5, 1}, 4.5);
  EXPECT_NEAR(r.lambda1, 0.234, 1e-3);
  EXPECT_NEAR(r.lambda2, 0.234, 1e-3);
  EXPECT_FALSE(r.hat_lambda1.has_value());
}

TEST(DecayRates, Critical) {
  const auto r = decay_rates({1, 0.5, 0.5, 1}, 2.0);
  ASSERT_TRUE(r.hat_lambda1.has_value());
  EXPECT_DOUBLE_EQ(*r.hat_lambda1, 1.0);
  EXPECT_DOUBLE_EQ(r.lambda1, 1.0);
  EXPECT_DOUBLE_EQ(r.lambda3, 1.0);
}

TEST(DecayRates, QuadraticRoots) {
  const auto r = decay_rates({1, 0.5, 0.5, 1}, 2.5);
  EXPECT_NEAR(r.lambda1, 0.5, 1e-15);
  EXPECT_NEAR(r.lambda3, 2.0, 1e-15);
  EXPECT_NEAR(r.lambda1 * r.lambda3, 1.0, 1e-14);
}

TEST(DecayRates, VietaProperties) {
  for (double a : {0.25, 0.5, 1.0, 2.0, 4.0})
    for (double d : {0.5, 1.0, 2.0}) {
      const SystemParams p{a, 0.1 * a, 0.5 / a, d};
      for (double f : {1.0, 1.01, 1.5, 3.0}) {
        const double s = f * critical_speed(p);
        const auto r = decay_rates(p, s);
        EXPECT_NEAR(r.lambda1 * r.lambda3, 1.0, 1e-10);
        EXPECT_NEAR(r.lambda2 * r.lambda4 / (a / d), 1.0, 1e-10);
        EXPECT_LE(r.lambda1, r.lambda3);
        EXPECT_LE(r.lambda2, r.lambda4);
        EXPECT_GT(r.lambda1, 0);
        EXPECT_GT(r.lambda2, 0);
        EXPECT_LE(r.lambda1, r.lambda2 + r.lambda4);
      }
    }
}

TEST(DecayRates, Subcritical) {
  try {
    decay_rates({1, 0.5, 0.5, 1}, 1.9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "subcritical speed");
  }
}

TEST(Admissibility, Verdicts) {
  const SystemParams p{1, 0.5, 0.5, 1};
  EXPECT_EQ(admissibility(p, 1.9).reason, "complex linearization roots");
  EXPECT_EQ(admissibility(p, -1).reason, "nonpositive speed");
  EXPECT_EQ(admissibility(p, 0).reason, "nonpositive speed");
  EXPECT_TRUE(admissibility(p, 2).admissible);
}

TEST(SpeciesSwap, Involution) {
  const SystemParams p{2.0, 0.7, 0.3, 1.5};
  const double s = 4.1;
  const auto w = swap_species(p, s);
  const auto back = swap_species(w.params, w.speed);
  EXPECT_NEAR(back.params.a, p.a, 1e-15);
  EXPECT_NEAR(back.params.b, p.b, 1e-15);
  EXPECT_NEAR(back.params.c, p.c, 1e-15);
  EXPECT_NEAR(back.params.d, p.d, 1e-15);
  EXPECT_NEAR(back.speed, s, 1e-14);
  EXPECT_NEAR(w.xscale * back.xscale, 1.0, 1e-15);
  EXPECT_NEAR(w.amplitude * back.amplitude, 1.0, 1e-15);
  EXPECT_EQ(classify_regime(w.params), Regime::StrictWeak);
  EXPECT_NEAR(critical_speed(w.params), critical_speed(p) / std::sqrt(p.a * p.d), 1e-14);
}
