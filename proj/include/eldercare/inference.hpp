#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>

#include "eldercare/types.hpp"

namespace eldercare {

class OrderingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The most recent fusion results, oldest first.
class FusionHistory {
 public:
  static constexpr std::size_t kCapacity = 100;

  /// Throws OrderingError unless result.window_end is newer than back().
  void push(FusionResult result);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const FusionResult& back() const { return entries_.back(); }
  const FusionResult& operator[](std::size_t i) const { return entries_[i]; }
  const FusionResult& from_back(std::size_t i) const { return entries_[entries_.size() - 1 - i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Start of the trailing run of lying windows, tracked beyond the retained
  /// entries so long runs are still measured from their true start.
  std::optional<Millis> lying_since() const { return lying_since_; }
  /// Latest falling window at or before lying_since().
  std::optional<Millis> fall_before_lying() const { return fall_before_lying_; }

 private:
  std::deque<FusionResult> entries_;
  std::optional<Millis> last_fall_;
  std::optional<Millis> lying_since_;
  std::optional<Millis> fall_before_lying_;
};

enum class FallIndicator : std::uint8_t {
  FallingActivity,
  FallenPosture,
  PostFallStillness,
  OrientationChange,
  HighIntensity,
};

std::string_view to_string(FallIndicator i);

/// Indicator weight (0.9, 0.7, 0.8, 0.6, 0.5).
double indicator_weight(FallIndicator i);

inline constexpr double kTotalIndicatorWeight = 3.5;

/// Normalised indicator score, halved when the sequence check failed.
double fall_probability(const std::set<FallIndicator>& indicators, bool sequence_confirmed);

/// Posture context captured for the risk report.
struct FallContext {
  Posture posture_before = Posture::Unknown;
  Posture posture_after = Posture::Unknown;
  bool impact_detected = false;
  Millis stillness_ms = 0;
};

struct FallAssessment {
  double probability = 0.0;
  double raw_score = 0.0;
  std::set<FallIndicator> indicators;
  bool sequence_confirmed = false;
  FallContext context;
};

FallAssessment assess_fall(const FusionHistory& history);

enum class HealthFlag : std::uint8_t { HeartRate, SpO2 };
std::string_view to_string(HealthFlag f);

struct HealthAssessment {
  double risk = 0.0;
  std::set<HealthFlag> flags;
  double hr_subscore = 0.0;
  double spo2_subscore = 0.0;
  std::optional<double> latest_hr;
  std::optional<double> latest_spo2;
  std::optional<double> hr_stddev;  // over the last 10 samples
  std::optional<double> hr_change;  // newest - oldest over the last 5 samples
  std::optional<double> spo2_drop;  // oldest - newest over the last 5 samples
};

HealthAssessment assess_health(const FusionHistory& history);

enum class BehaviorFlag : std::uint8_t { ProlongedInactivity, Agitation, LocationAnomaly };
std::string_view to_string(BehaviorFlag f);

/// Time of day interval in milliseconds since midnight; may wrap midnight.
struct QuietHours {
  Millis start = 22 * 3600'000;
  Millis end = 7 * 3600'000;

  bool contains(Millis time_of_day) const;
};

struct BehaviorAssessment {
  std::set<BehaviorFlag> flags;
  std::size_t stationary_count = 0;  // among the last 10
  std::size_t distinct_activities = 0;  // among the last 6
  Millis inactivity_span_ms = 0;
};

BehaviorAssessment assess_behavior(const FusionHistory& history, Millis time_of_day,
                                   const QuietHours& quiet);

struct InferenceBundle {
  double fall_probability = 0.0;
  std::set<FallIndicator> fall_indicators;
  bool sequence_confirmed = false;
  FallContext fall_context;
  double health_risk = 0.0;
  std::set<HealthFlag> health_flags;
  HealthAssessment health;
  std::set<BehaviorFlag> behavior_flags;
  BehaviorAssessment behavior;
};

/// Runs the three assessors over a history that already holds the latest
/// result.
InferenceBundle infer(const FusionHistory& history, Millis time_of_day, const QuietHours& quiet);

}  // namespace eldercare
