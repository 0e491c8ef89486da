#include "eldercare/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace eldercare {

void FusionHistory::push(FusionResult result) {
  if (!entries_.empty() && result.window_end <= entries_.back().window_end) {
    throw OrderingError("fusion result is not newer than the history tail");
  }
  const bool fall = result.activity == Activity::Falling || result.posture == Posture::Falling;
  if (result.posture == Posture::Lying) {
    if (!lying_since_) {
      lying_since_ = result.window_end;
      fall_before_lying_ = fall ? std::optional<Millis>(result.window_end) : last_fall_;
    }
  } else {
    lying_since_.reset();
    fall_before_lying_.reset();
  }
  if (fall) last_fall_ = result.window_end;
  entries_.push_back(std::move(result));
  if (entries_.size() > kCapacity) entries_.pop_front();
}

std::string_view to_string(FallIndicator i) {
  switch (i) {
    case FallIndicator::FallingActivity: return "falling_activity";
    case FallIndicator::FallenPosture: return "fallen_posture";
    case FallIndicator::PostFallStillness: return "post_fall_stillness";
    case FallIndicator::OrientationChange: return "orientation_change";
    case FallIndicator::HighIntensity: return "high_intensity";
  }
  return "?";
}

double indicator_weight(FallIndicator i) {
  switch (i) {
    case FallIndicator::FallingActivity: return 0.9;
    case FallIndicator::FallenPosture: return 0.7;
    case FallIndicator::PostFallStillness: return 0.8;
    case FallIndicator::OrientationChange: return 0.6;
    case FallIndicator::HighIntensity: return 0.5;
  }
  return 0.0;
}

double fall_probability(const std::set<FallIndicator>& indicators, bool sequence_confirmed) {
  double sum = 0.0;
  for (auto i : indicators) sum += indicator_weight(i);
  const double raw = std::min(1.0, sum / kTotalIndicatorWeight);
  return sequence_confirmed ? raw : raw * 0.5;
}

namespace {

constexpr Millis kFallenPostureWindow = 10'000;
constexpr double kStillIntensity = 0.1;
constexpr double kHighIntensity = 0.8;
constexpr double kImpactIntensity = 0.5;
constexpr double kOrientationDelta = 45.0;
constexpr std::size_t kSequenceLookback = 5;

bool lying_like(Posture p) { return p == Posture::Lying || p == Posture::Falling; }
bool upright(Posture p) { return p == Posture::Standing || p == Posture::Sitting; }

}  // namespace

FallAssessment assess_fall(const FusionHistory& history) {
  FallAssessment out;
  if (history.empty()) return out;
  const std::size_t n = history.size();
  const auto& latest = history.back();
  const std::size_t lookback = std::min(n, kSequenceLookback);

  if (latest.activity == Activity::Falling) out.indicators.insert(FallIndicator::FallingActivity);

  if (lying_like(latest.posture)) {
    const bool recent_fall = std::any_of(history.begin(), history.end(), [&](const auto& r) {
      return r.activity == Activity::Falling &&
             r.window_end >= latest.window_end - kFallenPostureWindow;
    });
    if (recent_fall) out.indicators.insert(FallIndicator::FallenPosture);
  }

  if (n >= 3 && history.from_back(0).motion_intensity < kStillIntensity &&
      history.from_back(1).motion_intensity < kStillIntensity) {
    bool fall_before = false;
    for (std::size_t i = 0; i + 2 < n; ++i) fall_before |= history[i].activity == Activity::Falling;
    if (fall_before) out.indicators.insert(FallIndicator::PostFallStillness);
  }

  if (n >= 2) {
    const auto& prev = history.from_back(1);
    if (prev.posture != latest.posture && prev.tilt_deg && latest.tilt_deg &&
        std::abs(*latest.tilt_deg - *prev.tilt_deg) > kOrientationDelta) {
      out.indicators.insert(FallIndicator::OrientationChange);
    }
  }

  bool impact = false;
  bool high = false;
  for (std::size_t i = 0; i < lookback; ++i) {
    const double m = history.from_back(i).motion_intensity;
    impact |= m >= kImpactIntensity;
    high |= m >= kHighIntensity;
  }
  if (high) out.indicators.insert(FallIndicator::HighIntensity);

  double sum = 0.0;
  for (auto i : out.indicators) sum += indicator_weight(i);
  out.raw_score = std::min(1.0, sum / kTotalIndicatorWeight);

  const bool impact_then_still = impact && latest.motion_intensity < kStillIntensity;
  bool transition = false;
  for (std::size_t i = 0; i + 1 < lookback; ++i) {
    transition |= upright(history.from_back(i + 1).posture) &&
                  history.from_back(i).posture == Posture::Lying;
  }
  out.sequence_confirmed = impact_then_still || (transition && out.raw_score >= 0.5);
  out.probability = out.sequence_confirmed ? out.raw_score : out.raw_score * 0.5;

  auto& ctx = out.context;
  ctx.posture_after = latest.posture;
  ctx.impact_detected = high;
  std::size_t i = 0;
  while (i < n && lying_like(history.from_back(i).posture)) ++i;
  if (i == 0 && n >= 2) {
    ctx.posture_before = history.from_back(1).posture;
  } else if (i > 0 && i < n) {
    ctx.posture_before = history.from_back(i).posture;
  }
  std::size_t still = 0;
  while (still < n && history.from_back(still).motion_intensity < kStillIntensity) ++still;
  if (still > 0) ctx.stillness_ms = latest.window_end - history.from_back(still - 1).window_end;
  return out;
}

std::string_view to_string(HealthFlag f) {
  switch (f) {
    case HealthFlag::HeartRate: return "hr";
    case HealthFlag::SpO2: return "spo2";
  }
  return "?";
}

namespace {

std::vector<double> present_values(const FusionHistory& history,
                                   std::optional<double> FusionResult::*field) {
  std::vector<double> out;
  for (const auto& r : history) {
    if (r.*field) out.push_back(*(r.*field));
  }
  return out;
}

}  // namespace

HealthAssessment assess_health(const FusionHistory& history) {
  HealthAssessment out;
  if (history.empty()) return out;
  const auto& latest = history.back();

  if (latest.heart_rate) {
    const double hr = *latest.heart_rate;
    out.latest_hr = hr;
    const auto series = present_values(history, &FusionResult::heart_rate);
    if (series.size() >= 10) {
      std::span<const double> last10(series.data() + series.size() - 10, 10);
      const double mean = std::accumulate(last10.begin(), last10.end(), 0.0) / 10.0;
      double ss = 0.0;
      for (double x : last10) ss += (x - mean) * (x - mean);
      out.hr_stddev = std::sqrt(ss / 10.0);
    }
    if (series.size() >= 5) out.hr_change = series.back() - series[series.size() - 5];

    double sub = 0.0;
    if (hr < 50.0 || hr > 120.0) sub = std::max(sub, 1.0);
    if (out.hr_stddev && *out.hr_stddev > 20.0) sub = std::max(sub, 0.5);
    if (out.hr_change && std::abs(*out.hr_change) > 20.0) sub = std::max(sub, 0.3);
    out.hr_subscore = sub;
  }

  if (latest.spo2) {
    const double spo2 = *latest.spo2;
    out.latest_spo2 = spo2;
    const auto series = present_values(history, &FusionResult::spo2);
    if (series.size() >= 5) out.spo2_drop = series[series.size() - 5] - series.back();

    double sub = 0.0;
    if (spo2 < 90.0) sub = std::max(sub, 1.0);
    if (out.spo2_drop && *out.spo2_drop > 3.0) sub = std::max(sub, 0.5);
    out.spo2_subscore = sub;
  }

  if (out.hr_subscore > 0.0) out.flags.insert(HealthFlag::HeartRate);
  if (out.spo2_subscore > 0.0) out.flags.insert(HealthFlag::SpO2);
  out.risk = (3.0 * out.hr_subscore + 4.0 * out.spo2_subscore) / 7.0;
  return out;
}

std::string_view to_string(BehaviorFlag f) {
  switch (f) {
    case BehaviorFlag::ProlongedInactivity: return "prolonged_inactivity";
    case BehaviorFlag::Agitation: return "agitation";
    case BehaviorFlag::LocationAnomaly: return "location_anomaly";
  }
  return "?";
}

bool QuietHours::contains(Millis time_of_day) const {
  if (start == end) return false;
  if (start < end) return time_of_day >= start && time_of_day < end;
  return time_of_day >= start || time_of_day < end;
}

BehaviorAssessment assess_behavior(const FusionHistory& history, Millis time_of_day,
                                   const QuietHours& quiet) {
  BehaviorAssessment out;
  if (history.empty()) return out;
  const std::size_t n = history.size();

  const std::size_t last10 = std::min<std::size_t>(n, 10);
  for (std::size_t i = 0; i < last10; ++i) {
    if (history.from_back(i).activity == Activity::Stationary) ++out.stationary_count;
  }
  out.inactivity_span_ms = history.back().window_end - history.from_back(last10 - 1).window_end;
  if (out.stationary_count >= 8 && !quiet.contains(time_of_day)) {
    out.flags.insert(BehaviorFlag::ProlongedInactivity);
  }

  std::set<Activity> seen;
  for (std::size_t i = 0; i < std::min<std::size_t>(n, 6); ++i) {
    seen.insert(history.from_back(i).activity);
  }
  out.distinct_activities = seen.size();
  if (seen.size() >= 4) out.flags.insert(BehaviorFlag::Agitation);

  const auto& latest = history.back();
  if (latest.location == kUnknownLocation && latest.motion_intensity > 0.5) {
    out.flags.insert(BehaviorFlag::LocationAnomaly);
  }
  return out;
}

InferenceBundle infer(const FusionHistory& history, Millis time_of_day, const QuietHours& quiet) {
  InferenceBundle b;
  auto fall = assess_fall(history);
  b.fall_probability = fall.probability;
  b.fall_indicators = std::move(fall.indicators);
  b.sequence_confirmed = fall.sequence_confirmed;
  b.fall_context = fall.context;
  b.health = assess_health(history);
  b.health_risk = b.health.risk;
  b.health_flags = b.health.flags;
  b.behavior = assess_behavior(history, time_of_day, quiet);
  b.behavior_flags = b.behavior.flags;
  return b;
}

}  // namespace eldercare
