#include "eldercare/risk.hpp"

#include <algorithm>
#include <stdexcept>

namespace eldercare {

void RiskWeights::validate() const {
  if (fall < 0 || health < 0 || behavior < 0 || anomaly < 0) {
    throw std::invalid_argument("risk weights must be non-negative");
  }
  if (fall + health + behavior + anomaly > 1.0 + 1e-9) {
    throw std::invalid_argument("risk weights must not sum above 1");
  }
}

void AlertThresholds::validate() const {
  if (!(0.0 < yellow && yellow < orange && orange < red && red <= 1.0)) {
    throw std::invalid_argument("alert thresholds must satisfy 0 < yellow < orange < red <= 1");
  }
}

std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::Rising: return "rising";
    case Trend::Falling: return "falling";
    case Trend::Stable: return "stable";
  }
  return "?";
}

std::string_view to_string(AlertLevel l) {
  switch (l) {
    case AlertLevel::None: return "NONE";
    case AlertLevel::Yellow: return "YELLOW";
    case AlertLevel::Orange: return "ORANGE";
    case AlertLevel::Red: return "RED";
  }
  return "?";
}

void RiskHistory::push(double score) {
  scores_.push_back(score);
  if (scores_.size() > kCapacity) scores_.erase(scores_.begin());
}

double base_score(const InferenceBundle& bundle, const FusionResult& fusion,
                  const RiskWeights& w) {
  const double behavior = bundle.behavior_flags.empty() ? 0.0 : 1.0;
  return w.fall * bundle.fall_probability + w.health * bundle.health_risk +
         w.behavior * behavior + w.anomaly * fusion.anomaly_score;
}

double apply_adjustments(double base, const InferenceBundle& bundle, const FusionResult& fusion,
                         Trend trend, const AdjustmentConstants& k) {
  double score = base;
  if (bundle.fall_probability > k.fall_trigger) score += k.fall_boost;
  if (bundle.health_flags.contains(HealthFlag::HeartRate)) score += k.hr_boost;
  if (bundle.health_flags.contains(HealthFlag::SpO2)) score += k.spo2_boost;
  if (!bundle.behavior_flags.empty()) score += k.behavior_boost;
  if (fusion.anomalous()) score += fusion.anomaly_score * k.anomaly_factor;
  if (trend == Trend::Rising) score += k.trend_step;
  if (trend == Trend::Falling) score -= k.trend_step;
  return std::clamp(score, 0.0, 1.0);
}

Trend classify_trend(std::span<const double> scores, double step) {
  if (scores.size() < RiskHistory::kCapacity) return Trend::Stable;
  auto window = scores.subspan(scores.size() - RiskHistory::kCapacity);
  const double delta = window.back() - window.front();
  if (delta > step) return Trend::Rising;
  if (delta < -step) return Trend::Falling;
  return Trend::Stable;
}

AlertLevel determine_level(double score, const AlertThresholds& t) {
  if (score >= t.red) return AlertLevel::Red;
  if (score >= t.orange) return AlertLevel::Orange;
  if (score >= t.yellow) return AlertLevel::Yellow;
  return AlertLevel::None;
}

AlertLevel raise_level(AlertLevel level) {
  switch (level) {
    case AlertLevel::None: return AlertLevel::Yellow;
    case AlertLevel::Yellow: return AlertLevel::Orange;
    default: return AlertLevel::Red;
  }
}

bool prolonged_lying_after_fall(const FusionHistory& history, const PostFallRule& rule) {
  const auto since = history.lying_since();
  const auto fall = history.fall_before_lying();
  if (history.empty() || !since || !fall) return false;
  const Millis now = history.back().window_end;
  return now - *since >= rule.lying_ms && now - *fall <= rule.fall_lookback_ms;
}

AlertLevel post_fall_escalation(const FusionHistory& history, AlertLevel level,
                                const PostFallRule& rule) {
  return prolonged_lying_after_fall(history, rule) ? raise_level(level) : level;
}

namespace {

nlohmann::ordered_json names(const auto& flags) {
  auto arr = nlohmann::ordered_json::array();
  for (auto f : flags) arr.push_back(std::string(to_string(f)));
  return arr;
}

}  // namespace

RiskDetail generate_risk_detail(const InferenceBundle& bundle, const FusionResult& fusion,
                                const RiskAssessment& assessment,
                                const AdjustmentConstants& k) {
  using Json = nlohmann::ordered_json;
  RiskDetail detail;
  auto& s = detail.sections;

  if (bundle.sequence_confirmed || bundle.fall_probability > k.fall_trigger || assessment.escalated) {
    const auto& ctx = bundle.fall_context;
    Json fall = Json::object();
    fall["probability"] = bundle.fall_probability;
    fall["sequence_confirmed"] = bundle.sequence_confirmed;
    fall["impact_detected"] = ctx.impact_detected;
    fall["posture_before"] = std::string(to_string(ctx.posture_before));
    fall["posture_after"] = std::string(to_string(ctx.posture_after));
    fall["stillness_ms"] = ctx.stillness_ms;
    fall["indicators"] = names(bundle.fall_indicators);
    if (assessment.escalated) fall["prolonged_lying_escalation"] = true;
    s["fall"] = std::move(fall);
  }

  if (!bundle.health_flags.empty()) {
    const auto& h = bundle.health;
    Json health = Json::object();
    if (bundle.health_flags.contains(HealthFlag::HeartRate) && h.latest_hr) {
      Json hr = Json::object();
      const double v = *h.latest_hr;
      hr["value"] = v;
      hr["deviation"] = v > 120.0 ? v - 120.0 : (v < 50.0 ? v - 50.0 : 0.0);
      if (h.hr_stddev) hr["stddev_10"] = *h.hr_stddev;
      if (h.hr_change) hr["change_5"] = *h.hr_change;
      health["hr"] = std::move(hr);
    }
    if (bundle.health_flags.contains(HealthFlag::SpO2) && h.latest_spo2) {
      Json spo2 = Json::object();
      const double v = *h.latest_spo2;
      spo2["value"] = v;
      spo2["deviation"] = v < 90.0 ? v - 90.0 : 0.0;
      if (h.spo2_drop) spo2["drop_5"] = *h.spo2_drop;
      health["spo2"] = std::move(spo2);
    }
    health["risk"] = bundle.health_risk;
    s["health"] = std::move(health);
  }

  if (!bundle.behavior_flags.empty()) {
    const auto& b = bundle.behavior;
    Json behavior = Json::object();
    behavior["patterns"] = names(bundle.behavior_flags);
    if (bundle.behavior_flags.contains(BehaviorFlag::ProlongedInactivity)) {
      behavior["stationary_of_last_10"] = b.stationary_count;
      behavior["duration_ms"] = b.inactivity_span_ms;
    }
    if (bundle.behavior_flags.contains(BehaviorFlag::Agitation)) {
      behavior["distinct_activities_of_last_6"] = b.distinct_activities;
    }
    if (bundle.behavior_flags.contains(BehaviorFlag::LocationAnomaly)) {
      behavior["intensity"] = fusion.motion_intensity;
    }
    s["behavior"] = std::move(behavior);
  }

  if (fusion.anomalous()) {
    Json sensor = Json::object();
    sensor["score"] = fusion.anomaly_score;
    sensor["flags"] = names(fusion.anomaly_flags);
    if (fusion.anomaly_flags.contains(AnomalyFlag::Motion)) {
      sensor["raw_intensity"] = fusion.raw_intensity;
    }
    s["sensor"] = std::move(sensor);
  }
  return detail;
}

RiskAssessment assess(const InferenceBundle& bundle, const FusionResult& fusion,
                      const FusionHistory& history, RiskHistory& risk_history,
                      const RiskConfig& config) {
  RiskAssessment out;
  out.base_score = base_score(bundle, fusion, config.weights);
  out.trend = classify_trend(risk_history.scores(), config.adjustments.trend_step);
  out.adjusted_score =
      apply_adjustments(out.base_score, bundle, fusion, out.trend, config.adjustments);
  const auto level = determine_level(out.adjusted_score, config.thresholds);
  out.level = post_fall_escalation(history, level, config.post_fall);
  out.escalated = out.level != level;
  out.detail = generate_risk_detail(bundle, fusion, out, config.adjustments);
  risk_history.push(out.adjusted_score);
  return out;
}

}  // namespace eldercare
