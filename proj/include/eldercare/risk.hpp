#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

#include "eldercare/inference.hpp"
#include "eldercare/types.hpp"

namespace eldercare {

struct RiskWeights {
  double fall = 0.4;
  double health = 0.4;
  double behavior = 0.15;
  double anomaly = 0.05;

  void validate() const;
};

/// Additive corrections applied on top of the weighted base score.
struct AdjustmentConstants {
  double fall_trigger = 0.7;  // fall probability must exceed this
  double fall_boost = 0.2;
  double hr_boost = 0.15;
  double spo2_boost = 0.2;
  double behavior_boost = 0.1;
  double anomaly_factor = 0.1;
  double trend_step = 0.2;
};

enum class Trend : std::uint8_t { Rising, Falling, Stable };
enum class AlertLevel : std::uint8_t { None, Yellow, Orange, Red };

std::string_view to_string(Trend t);
std::string_view to_string(AlertLevel l);

struct AlertThresholds {
  double yellow = 0.3;
  double orange = 0.6;
  double red = 0.8;

  void validate() const;
};

/// Last five adjusted scores, oldest first.
class RiskHistory {
 public:
  static constexpr std::size_t kCapacity = 5;

  void push(double score);
  std::size_t size() const { return scores_.size(); }
  std::span<const double> scores() const { return {scores_.data(), scores_.size()}; }

 private:
  std::vector<double> scores_;
};

/// Per-dimension factors that crossed their triggers. Key order is fixed so the
/// serialised form is stable.
struct RiskDetail {
  nlohmann::ordered_json sections = nlohmann::ordered_json::object();

  bool empty() const { return sections.empty(); }
  bool has_section(std::string_view dimension) const {
    return sections.contains(std::string(dimension));
  }
  std::string serialize() const { return sections.dump(); }
};

struct RiskAssessment {
  double base_score = 0.0;
  double adjusted_score = 0.0;
  Trend trend = Trend::Stable;
  AlertLevel level = AlertLevel::None;
  bool escalated = false;  // raised one step by the post-fall rule
  RiskDetail detail;
};

double base_score(const InferenceBundle& bundle, const FusionResult& fusion,
                  const RiskWeights& weights = {});

double apply_adjustments(double base, const InferenceBundle& bundle, const FusionResult& fusion,
                         Trend trend, const AdjustmentConstants& k = {});

/// Stable until five scores exist; then newest - oldest against +-0.2.
Trend classify_trend(std::span<const double> scores, double step = 0.2);

AlertLevel determine_level(double score, const AlertThresholds& thresholds = {});

AlertLevel raise_level(AlertLevel level);

struct PostFallRule {
  Millis fall_lookback_ms = 120'000;
  Millis lying_ms = 60'000;
};

/// True when a falling window within the lookback precedes a lying run that
/// has lasted at least lying_ms.
bool prolonged_lying_after_fall(const FusionHistory& history, const PostFallRule& rule = {});

AlertLevel post_fall_escalation(const FusionHistory& history, AlertLevel level,
                                const PostFallRule& rule = {});

RiskDetail generate_risk_detail(const InferenceBundle& bundle, const FusionResult& fusion,
                                const RiskAssessment& assessment,
                                const AdjustmentConstants& k = {});

struct RiskConfig {
  RiskWeights weights;
  AdjustmentConstants adjustments;
  AlertThresholds thresholds;
  PostFallRule post_fall;
};

/// Full scoring pass. The trend comes from the scores before this one; the
/// adjusted score is appended to risk_history.
RiskAssessment assess(const InferenceBundle& bundle, const FusionResult& fusion,
                      const FusionHistory& history, RiskHistory& risk_history,
                      const RiskConfig& config = {});

}  // namespace eldercare
