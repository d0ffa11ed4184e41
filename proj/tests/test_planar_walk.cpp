#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qnav/planar_walk.hpp"

using namespace qnav;

namespace {

ProtocolSpec spec(ProtocolKind k, double p) { return {k, WernerParameter{p}}; }

double b_sign(ProtocolKind k) { return k == ProtocolKind::Minus ? 1.0 : -1.0; }

}  // namespace

TEST(ApplyStep, CoincidentStartStaysWithinTwoSteps) {
  auto rng = substream(11, 0);
  const auto start = WalkState::at_separation(0.0, 0.7);
  for (auto k : {ProtocolKind::Plus, ProtocolKind::Minus, ProtocolKind::Classical})
    for (int i = 0; i < 2000; ++i) {
      const double r = step(start, spec(k, 0.6), rng).r_prime;
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.4 + 1e-12);
    }
}

TEST(ApplyStep, PlusRuleCancelsParallelAntiCorrelatedSteps) {
  const auto start = WalkState::at_separation(1.3, 0.5);
  const PlanarDirection n{0.9};
  for (int sa : {1, -1}) {
    const auto out = apply_step(start, spec(ProtocolKind::Plus, 1.0), n, n, {sa, -sa});
    EXPECT_NEAR(out.r_prime, 1.3, 1e-15);
  }
}

TEST(ApplyStep, MinusRuleDoublesParallelAntiCorrelatedSteps) {
  const double r = 1.3, l = 0.5, angle = 0.9;
  const auto start = WalkState::at_separation(r, l);
  const PlanarDirection n{angle};
  for (int sa : {1, -1}) {
    const auto out = apply_step(start, spec(ProtocolKind::Minus, 1.0), n, n, {sa, -sa});
    const double x = r + 2 * l * sa * std::cos(angle), y = 2 * l * sa * std::sin(angle);
    EXPECT_NEAR(out.r_prime, std::hypot(x, y), 1e-15);
  }
}

TEST(ExpectedSqSeparation, ClosedFormLaws) {
  EXPECT_DOUBLE_EQ(expected_sq_separation(1.0, 0.5, spec(ProtocolKind::Plus, 1.0)), 1.25);
  EXPECT_DOUBLE_EQ(expected_sq_separation(1.0, 0.5, spec(ProtocolKind::Minus, 1.0)), 1.75);
  EXPECT_DOUBLE_EQ(expected_sq_separation(1.0, 0.5, spec(ProtocolKind::Classical, 1.0)), 1.5);
  EXPECT_DOUBLE_EQ(expected_sq_separation(1.0, 1.0, spec(ProtocolKind::Plus, 0.0)), 3.0);
}

TEST(ExpectedSqSeparation, MatchesGridOracle) {
  EXPECT_NEAR(expected_sq_separation(1.0, 1.0, spec(ProtocolKind::Plus, 0.5)), 1.0 + oracle::grid_weight(0.5, -1, 256),
              1e-9);
  for (double p : {0.0, 0.2, 0.5, 0.9, 1.0})
    for (auto k : {ProtocolKind::Plus, ProtocolKind::Minus}) {
      const auto s = spec(k, p);
      EXPECT_NEAR(s.weight(), oracle::grid_weight(p, b_sign(k), 128), 1e-9) << to_string(k) << " p=" << p;
    }
  EXPECT_NEAR(spec(ProtocolKind::Classical, 0.7).weight(), oracle::grid_weight(0.0, -1, 128), 1e-9);
}

TEST(ExpectedSqSeparation, RejectsInvalidLengths) {
  EXPECT_THROW(expected_sq_separation(-1.0, 1.0, {}), std::invalid_argument);
  EXPECT_THROW(expected_sq_separation(1.0, 0.0, {}), std::invalid_argument);
  EXPECT_THROW(WalkState::at_separation(1.0, -0.1), std::invalid_argument);
}

TEST(MonteCarlo, PlusSingletAtUnitSeparation) {
  const auto est = mc_sq_separation_seeded(1.0, 0.5, spec(ProtocolKind::Plus, 1.0), 1000000, 21);
  EXPECT_LE(std::abs(est.z_score(1.25)), 3.0) << est.mean << " ± " << est.std_error;
}

TEST(MonteCarlo, MinusSingletFromCoincidence) {
  const auto est = mc_sq_separation_seeded(0.0, 1.0, spec(ProtocolKind::Minus, 1.0), 1000000, 22);
  EXPECT_LE(std::abs(est.z_score(3.0)), 3.0) << est.mean << " ± " << est.std_error;
}

TEST(MonteCarlo, PlusWernerAgreesWithGridOracle) {
  const double expected = 4.0 + oracle::grid_weight(0.3, -1, 256);
  EXPECT_NEAR(expected, 4.0 + 1.7, 1e-9);
  const auto est = mc_sq_separation_seeded(2.0, 1.0, spec(ProtocolKind::Plus, 0.3), 1000000, 23);
  EXPECT_LE(std::abs(est.z_score(expected)), 3.0) << est.mean << " ± " << est.std_error;
}

TEST(MonteCarlo, UnseededOverloadUsesCallerEngine) {
  Engine rng{99};
  const auto est = mc_sq_separation(1.0, 0.5, spec(ProtocolKind::Classical, 1.0), 200000, rng);
  EXPECT_LE(std::abs(est.z_score(1.5)), 3.0);
  EXPECT_THROW(mc_sq_separation(1.0, 0.5, {}, 999, rng), std::invalid_argument);
}

TEST(MonteCarlo, SeededResultIndependentOfWorkerCount) {
  const auto a = mc_sq_separation_seeded(1.0, 0.5, {}, 300000, 5, 1);
  const auto b = mc_sq_separation_seeded(1.0, 0.5, {}, 300000, 5, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Ensemble, FirstStepReproducesSingleStepLaw) {
  const auto proto = spec(ProtocolKind::Minus, 0.8);
  const auto stats = run_ensemble(WalkState::at_separation(1.0, 0.5), proto, {1, 200000, 0.0}, 31);
  ASSERT_EQ(stats.mean_r2.size(), 2u);
  EXPECT_DOUBLE_EQ(stats.mean_r2[0], 1.0);
  EXPECT_LE(std::abs(stats.mean_r2[1] - expected_sq_separation(1.0, 0.5, proto)), 3 * stats.r2_stderr[1]);
}

TEST(Ensemble, CorrelatedPlusMeetsAtLeastAsOftenAsClassical) {
  const double l = 1.0;
  const EnsembleSpec es{200, 10000, 0.1 * l};
  const auto start = WalkState::at_separation(5 * l, l);
  const auto plus = run_ensemble(start, spec(ProtocolKind::Plus, 1.0), es, 41);
  const auto classical = run_ensemble(start, spec(ProtocolKind::Classical, 1.0), es, 41);
  EXPECT_GE(plus.meeting_fraction.back(), classical.meeting_fraction.back());
  for (std::size_t s = 1; s < plus.meeting_fraction.size(); ++s)
    EXPECT_GE(plus.meeting_fraction[s], plus.meeting_fraction[s - 1]);
}

TEST(Ensemble, ZeroMeetingRadiusNeverMeets) {
  const auto stats = run_ensemble(WalkState::at_separation(0.3, 0.5), {}, {100, 500, 0.0}, 51);
  EXPECT_EQ(stats.meeting_fraction.back(), 0.0);
}

TEST(Ensemble, DeterministicAcrossWorkerCounts) {
  const auto start = WalkState::at_separation(2.0, 0.5);
  const EnsembleSpec es{50, 1000, 0.05};
  const auto a = run_ensemble(start, {}, es, 61, 1);
  const auto b = run_ensemble(start, {}, es, 61, 4);
  EXPECT_EQ(a.mean_r2, b.mean_r2);
  EXPECT_EQ(a.meeting_fraction, b.meeting_fraction);
}

TEST(Ensemble, SingleWalkerZeroSteps) {
  const auto stats = run_ensemble(WalkState::at_separation(1.5, 0.5), {}, {0, 1, 0.1}, 0);
  ASSERT_EQ(stats.mean_r2.size(), 1u);
  EXPECT_DOUBLE_EQ(stats.mean_r2[0], 2.25);
  EXPECT_THROW(run_ensemble(WalkState::at_separation(1.0, 0.5), {}, {1, 0, 0.1}, 0), std::invalid_argument);
}

TEST(Ensemble, TranslationInvariance) {
  // Same seed, both agents shifted: the separation sequence is the same up to rounding.
  const Vec2 shift{123.25, -77.5};
  const WalkState a{{1.0, 0.0}, {0.0, 0.0}, 0.5};
  const WalkState b{Vec2{1.0, 0.0} + shift, shift, 0.5};
  auto ra = substream(71, 0), rb = substream(71, 0);
  WalkState sa = a, sb = b;
  for (int i = 0; i < 500; ++i) {
    const auto oa = step(sa, {}, ra);
    const auto ob = step(sb, {}, rb);
    EXPECT_NEAR(oa.r_prime, ob.r_prime, 1e-10);
    EXPECT_EQ(oa.signs, ob.signs);
    sa = oa.new_state;
    sb = ob.new_state;
  }
}
