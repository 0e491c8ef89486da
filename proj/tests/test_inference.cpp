#include <gtest/gtest.h>

#include <vector>

#include "eldercare/inference.hpp"
#include "eldercare/sim/rng.hpp"

using namespace eldercare;

namespace {

constexpr double kEps = 1e-9;

FusionResult entry(Millis end, Activity a = Activity::Walking, Posture p = Posture::Standing,
                   double intensity = 0.35) {
  FusionResult r;
  r.window_end = end;
  r.activity = a;
  r.posture = p;
  r.motion_intensity = intensity;
  r.raw_intensity = intensity;
  r.tilt_deg = p == Posture::Lying ? 90.0 : (p == Posture::Sitting ? 40.0 : 2.0);
  return r;
}

FusionHistory quiet_history(int n, Millis start = 1000) {
  FusionHistory h;
  for (int i = 0; i < n; ++i) {
    auto r = entry(start + i * 1000);
    r.heart_rate = 72;
    r.spo2 = 97;
    h.push(r);
  }
  return h;
}

constexpr Millis kAfternoon = 14 * 3600'000;

}  // namespace

TEST(FusionHistory, PushAndCapacity) {
  FusionHistory h;
  h.push(entry(1000));
  EXPECT_EQ(h.size(), 1u);
  for (int i = 2; i <= 101; ++i) h.push(entry(i * 1000));
  EXPECT_EQ(h.size(), 100u);
  EXPECT_EQ(h[0].window_end, 2000);
  EXPECT_EQ(h.back().window_end, 101'000);
}

TEST(FusionHistory, RejectsOlderOrEqualTimestamps) {
  FusionHistory h;
  h.push(entry(5000));
  EXPECT_THROW(h.push(entry(4000)), OrderingError);
  EXPECT_THROW(h.push(entry(5000)), OrderingError);
}

TEST(FusionHistory, TracksLyingRunBeyondCapacity) {
  FusionHistory h;
  h.push(entry(1000, Activity::Falling, Posture::Standing));
  for (int i = 2; i <= 300; ++i) h.push(entry(i * 1000, Activity::Lying, Posture::Lying, 0.0));
  EXPECT_EQ(h.lying_since(), 2000);
  EXPECT_EQ(h.fall_before_lying(), 1000);
  h.push(entry(301'000));
  EXPECT_FALSE(h.lying_since());
}

TEST(FallProbability, Arithmetic) {
  using I = FallIndicator;
  std::set<I> all{I::FallingActivity, I::FallenPosture, I::PostFallStillness,
                  I::OrientationChange, I::HighIntensity};
  EXPECT_NEAR(fall_probability(all, true), (0.9 + 0.7 + 0.8 + 0.6 + 0.5) / 3.5, kEps);
  EXPECT_NEAR(fall_probability(all, true), 1.0, kEps);
  EXPECT_EQ(fall_probability({}, true), 0.0);
  EXPECT_NEAR(fall_probability({I::FallingActivity}, false), 0.9 / 3.5 * 0.5, kEps);
  EXPECT_NEAR(fall_probability({I::FallingActivity}, false), 0.1286, 1e-4);
}

TEST(FallProbabilityProperty, UnconfirmedIsHalf) {
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::set<FallIndicator> s;
    for (unsigned b = 0; b < 5; ++b) {
      if (mask & (1u << b)) s.insert(static_cast<FallIndicator>(b));
    }
    EXPECT_NEAR(fall_probability(s, false), 0.5 * fall_probability(s, true), kEps);
  }
}

TEST(AssessFall, ConfirmedSequenceFromImpactThenStillness) {
  FusionHistory h;
  h.push(entry(1000));
  h.push(entry(2000, Activity::Falling, Posture::Standing, 0.9));
  h.push(entry(3000, Activity::Lying, Posture::Lying, 0.02));
  auto f = assess_fall(h);
  EXPECT_TRUE(f.sequence_confirmed);
  EXPECT_EQ(f.context.posture_before, Posture::Standing);
  EXPECT_EQ(f.context.posture_after, Posture::Lying);
  EXPECT_TRUE(f.context.impact_detected);
  EXPECT_TRUE(f.indicators.contains(FallIndicator::FallenPosture));
  EXPECT_TRUE(f.indicators.contains(FallIndicator::OrientationChange));
  EXPECT_TRUE(f.indicators.contains(FallIndicator::HighIntensity));
  EXPECT_NEAR(f.probability, f.raw_score, kEps);
}

TEST(AssessFall, StillnessNeedsTwoWindowsAfterFall) {
  FusionHistory h;
  h.push(entry(1000, Activity::Falling, Posture::Lying, 0.9));
  h.push(entry(2000, Activity::Lying, Posture::Lying, 0.02));
  EXPECT_FALSE(assess_fall(h).indicators.contains(FallIndicator::PostFallStillness));
  h.push(entry(3000, Activity::Lying, Posture::Lying, 0.02));
  auto f = assess_fall(h);
  EXPECT_TRUE(f.indicators.contains(FallIndicator::PostFallStillness));
  EXPECT_EQ(f.context.stillness_ms, 1000);
}

TEST(AssessFall, NothingInQuietHistory) {
  auto f = assess_fall(quiet_history(20));
  EXPECT_TRUE(f.indicators.empty());
  EXPECT_EQ(f.probability, 0.0);
  EXPECT_FALSE(f.sequence_confirmed);
}

TEST(AssessHealth, AllNormal) {
  auto h = assess_health(quiet_history(12));
  EXPECT_EQ(h.risk, 0.0);
  EXPECT_TRUE(h.flags.empty());
}

TEST(AssessHealth, HeartRateBreach) {
  auto hist = quiet_history(3);
  auto r = entry(10'000);
  r.heart_rate = 130;
  r.spo2 = 97;
  hist.push(r);
  auto h = assess_health(hist);
  EXPECT_NEAR(h.risk, 3.0 / 7.0, kEps);
  EXPECT_EQ(h.flags, std::set<HealthFlag>{HealthFlag::HeartRate});
}

TEST(AssessHealth, Spo2Breach) {
  auto hist = quiet_history(3);
  auto r = entry(10'000);
  r.heart_rate = 80;
  r.spo2 = 88;
  hist.push(r);
  auto h = assess_health(hist);
  EXPECT_NEAR(h.risk, 4.0 / 7.0, kEps);
  EXPECT_EQ(h.flags, std::set<HealthFlag>{HealthFlag::SpO2});
}

TEST(AssessHealth, Spo2TrendOverFiveSamples) {
  FusionHistory hist;
  const double series[] = {97, 96, 95, 94, 93};
  for (int i = 0; i < 5; ++i) {
    auto r = entry((i + 1) * 1000);
    r.spo2 = series[i];
    r.heart_rate = 75;
    hist.push(r);
  }
  auto h = assess_health(hist);
  EXPECT_TRUE(h.flags.contains(HealthFlag::SpO2));
  EXPECT_NEAR(*h.spo2_drop, 4.0, kEps);
  EXPECT_NEAR(h.risk, 4.0 * 0.5 / 7.0, kEps);
}

TEST(AssessHealth, RapidHeartRateChange) {
  FusionHistory hist;
  const double series[] = {70, 75, 80, 88, 95};
  for (int i = 0; i < 5; ++i) {
    auto r = entry((i + 1) * 1000);
    r.heart_rate = series[i];
    hist.push(r);
  }
  auto h = assess_health(hist);
  EXPECT_NEAR(*h.hr_change, 25.0, kEps);
  EXPECT_NEAR(h.hr_subscore, 0.3, kEps);
}

// Turning on more sub-conditions never lowers the health risk.
TEST(AssessHealthProperty, Monotone) {
  auto build = [](bool hr_breach, bool hr_swing, bool spo2_breach, bool spo2_drop) {
    FusionHistory hist;
    for (int i = 0; i < 10; ++i) {
      auto r = entry((i + 1) * 1000);
      double hr = 75;
      if (hr_swing) hr = (i % 2) ? 110 : 60;  // stddev 25
      r.heart_rate = hr;
      r.spo2 = spo2_drop && i >= 5 ? 97.0 - (i - 5) * 1.5 : 97.0;
      hist.push(r);
    }
    auto last = hist.back();
    FusionHistory out;
    for (std::size_t i = 0; i + 1 < hist.size(); ++i) out.push(hist[i]);
    if (hr_breach) last.heart_rate = 130;
    if (spo2_breach) last.spo2 = 88;
    out.push(last);
    return assess_health(out).risk;
  };
  for (unsigned a = 0; a < 16; ++a) {
    for (unsigned bit = 0; bit < 4; ++bit) {
      if (a & (1u << bit)) continue;
      const unsigned b = a | (1u << bit);
      const double ra = build(a & 1, a & 2, a & 4, a & 8);
      const double rb = build(b & 1, b & 2, b & 4, b & 8);
      EXPECT_GE(rb + kEps, ra) << a << " -> " << b;
    }
  }
}

TEST(AssessBehavior, ProlongedInactivityOutsideQuietHours) {
  FusionHistory h;
  for (int i = 0; i < 10; ++i) {
    h.push(entry((i + 1) * 1000, i == 4 ? Activity::Walking : Activity::Stationary,
                 Posture::Sitting, 0.02));
  }
  auto b = assess_behavior(h, kAfternoon, {});
  EXPECT_EQ(b.flags, std::set<BehaviorFlag>{BehaviorFlag::ProlongedInactivity});
  EXPECT_EQ(b.stationary_count, 9u);
  // Same pattern at 23:00 is expected rest.
  EXPECT_TRUE(assess_behavior(h, 23 * 3600'000, {}).flags.empty());
}

TEST(AssessBehavior, Agitation) {
  FusionHistory h;
  const Activity seq[] = {Activity::Walking, Activity::Sitting, Activity::Running,
                          Activity::Stationary, Activity::Walking, Activity::Sitting};
  for (int i = 0; i < 6; ++i) h.push(entry((i + 1) * 1000, seq[i]));
  auto b = assess_behavior(h, kAfternoon, {});
  EXPECT_TRUE(b.flags.contains(BehaviorFlag::Agitation));
  EXPECT_EQ(b.distinct_activities, 4u);
}

TEST(AssessBehavior, LocationAnomalyNeedsHighIntensity) {
  FusionHistory h;
  h.push(entry(1000, Activity::Walking, Posture::Standing, 0.3));
  EXPECT_FALSE(assess_behavior(h, kAfternoon, {}).flags.contains(BehaviorFlag::LocationAnomaly));
  h.push(entry(2000, Activity::Running, Posture::Standing, 0.6));
  EXPECT_TRUE(assess_behavior(h, kAfternoon, {}).flags.contains(BehaviorFlag::LocationAnomaly));
}

TEST(QuietHours, WrapsMidnight) {
  QuietHours q;
  EXPECT_TRUE(q.contains(23 * 3600'000));
  EXPECT_TRUE(q.contains(3 * 3600'000));
  EXPECT_FALSE(q.contains(7 * 3600'000));
  EXPECT_TRUE(q.contains(22 * 3600'000));
  EXPECT_FALSE(q.contains(12 * 3600'000));
  QuietHours day{9 * 3600'000, 17 * 3600'000};
  EXPECT_TRUE(day.contains(12 * 3600'000));
  EXPECT_FALSE(day.contains(20 * 3600'000));
}

// Behaviour flags depend only on the last ten entries.
TEST(AssessBehaviorProperty, OnlyLastTenMatter) {
  sim::SimRng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<FusionResult> tail;
    for (int i = 0; i < 10; ++i) {
      auto r = entry(0, static_cast<Activity>(rng.uniform(0, 6)), Posture::Standing,
                     rng.uniform(0, 1));
      if (rng.bernoulli(0.5)) r.location = "kitchen";
      tail.push_back(r);
    }
    FusionHistory a, b;
    Millis t = 1000;
    for (int i = 0; i < 5; ++i) a.push(entry(t += 1000, Activity::Running, Posture::Standing, 0.9));
    for (int i = 0; i < 30; ++i) b.push(entry(t += 1000, Activity::Stationary, Posture::Lying, 0.0));
    const Millis base = t;
    for (int i = 0; i < 10; ++i) {
      auto r = tail[i];
      r.window_end = base + (i + 1) * 1000;
      a.push(r);
      b.push(r);
    }
    ASSERT_EQ(assess_behavior(a, kAfternoon, {}).flags, assess_behavior(b, kAfternoon, {}).flags);
  }
}

TEST(Infer, QuietHistoryGivesEmptyBundle) {
  auto b = infer(quiet_history(15), kAfternoon, {});
  EXPECT_EQ(b.fall_probability, 0.0);
  EXPECT_EQ(b.health_risk, 0.0);
  EXPECT_TRUE(b.fall_indicators.empty());
  EXPECT_TRUE(b.health_flags.empty());
  EXPECT_TRUE(b.behavior_flags.empty());
}

TEST(InferProperty, PureAndBounded) {
  sim::SimRng rng(17);
  FusionHistory h;
  for (int i = 0; i < 400; ++i) {
    auto r = entry((i + 1) * 1000, static_cast<Activity>(rng.uniform(0, 6)),
                   static_cast<Posture>(rng.uniform(0, 5)), rng.uniform(0, 1));
    if (rng.bernoulli(0.8)) r.heart_rate = rng.uniform(40, 140);
    if (rng.bernoulli(0.8)) r.spo2 = rng.uniform(85, 100);
    h.push(r);
    const Millis tod = static_cast<Millis>(rng.uniform(0, 86'400'000));
    auto x = infer(h, tod, {});
    auto y = infer(h, tod, {});
    ASSERT_EQ(x.fall_probability, y.fall_probability);
    ASSERT_EQ(x.health_risk, y.health_risk);
    ASSERT_EQ(x.behavior_flags, y.behavior_flags);
    ASSERT_GE(x.fall_probability, 0.0);
    ASSERT_LE(x.fall_probability, 1.0);
    ASSERT_GE(x.health_risk, 0.0);
    ASSERT_LE(x.health_risk, 1.0);
  }
}
