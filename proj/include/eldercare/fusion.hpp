#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>

#include "eldercare/types.hpp"
#include "eldercare/window_manager.hpp"

namespace eldercare {

/// Static reliability weight per sensor type. Door sensors carry no weight.
class SensorWeightTable {
 public:
  SensorWeightTable();
  explicit SensorWeightTable(std::map<SensorType, double> weights);

  /// Zero for types without a fusion weight.
  double weight(SensorType type) const;
  bool has_weight(SensorType type) const { return weights_.contains(type); }
  void set(SensorType type, double weight);
  const std::map<SensorType, double>& weights() const { return weights_; }

 private:
  std::map<SensorType, double> weights_;
};

class NoDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WeightedValue {
  double value = 0.0;
  double weight = 0.0;
};

/// Weighted mean sum(w*m)/sum(w). Throws NoDataError on an empty list and
/// std::invalid_argument for a non-positive weight.
double fuse_scalar(std::span<const WeightedValue> measurements);

/// min(0.95, 0.5 + 0.1 * n_sources)
double compute_confidence(std::size_t n_sources);

struct MotionIntensity {
  double clipped = 0.0;
  double raw = 0.0;
};

inline constexpr double kIntensityScale = 5.0;

/// Mean absolute change of |a| between consecutive samples, over 5.0.
MotionIntensity motion_intensity(std::span<const Vec3> accel);

struct TimedAccel {
  Millis t = 0;
  Vec3 accel;
};

inline constexpr double kDropThreshold = 15.0;  // m/s^2
inline constexpr Millis kDropMinDuration = 100;

/// True when some run of consecutive samples all below the threshold spans at
/// least the minimum duration (first to last sample of the run).
bool detect_accel_drop(std::span<const TimedAccel> series,
                       double threshold = kDropThreshold,
                       Millis min_duration = kDropMinDuration);

inline constexpr double kGravity = 9.81;

struct PostureVote {
  Posture posture = Posture::Unknown;
  double weight = 0.0;
};

struct PostureEstimate {
  Posture posture = Posture::Unknown;
  std::optional<double> tilt_deg;  // angle of the mean accel vector from +z
};

/// Angle in degrees between v and (0,0,1). Undefined (nullopt) for v = 0.
std::optional<double> tilt_from_vertical(const Vec3& v);

/// Posture from the angle alone: <30 standing, [30,60] sitting, >60 lying.
Posture posture_from_tilt(double tilt_deg);

/// Accelerometer vote plus camera votes; highest total weight wins. The
/// accelerometer vote is `falling` when the mean |a| is below 0.5 g.
PostureEstimate estimate_posture(std::span<const Vec3> trailing_accel,
                                 std::span<const PostureVote> camera_votes,
                                 double accel_weight = 1.0);

Activity classify_activity(double intensity, bool drop, Posture posture);

struct AnomalyResult {
  double score = 0.0;
  std::set<AnomalyFlag> flags;

  bool anomalous() const { return score >= 0.5; }
};

struct AnomalyConstants {
  double hr_low = 50.0;
  double hr_high = 120.0;
  double hr_stddev = 20.0;
  double spo2_low = 90.0;
  double spo2_drop = 3.0;
  double motion_raw_limit = 2.0;
  double active_mean = 0.4;
  double still_after_active = 0.05;
  double hr_contribution = 0.3;
  double spo2_contribution = 0.4;
  double motion_contribution = 0.5;
};

/// Histories are oldest-first and include the current sample as the last
/// element; an empty history skips that metric. prev_intensities holds the
/// clipped intensities of the windows before the current one.
AnomalyResult detect_anomalies(std::span<const double> hr_history,
                               std::span<const double> spo2_history,
                               double raw_intensity,
                               std::span<const double> prev_intensities,
                               const AnomalyConstants& k = {});

/// Rolling per-elder state that anomaly detection needs from earlier windows.
struct VitalsHistory {
  std::deque<double> heart_rate;   // last 10 fused values
  std::deque<double> spo2;         // last 5 fused values
  std::deque<double> intensities;  // last 3 clipped intensities

  void record(const FusionResult& result);
};

struct FusionConfig {
  SensorWeightTable weights;
  std::map<std::string, std::string> sensor_rooms;  // sensor_id -> room label
  AnomalyConstants anomaly;
  Millis posture_window_ms = 500;
};

/// Full per-window feature extraction. Pure in (window, config, history).
FusionResult fuse_window(const FusionWindow& window, const FusionConfig& config,
                         const VitalsHistory& history);

}  // namespace eldercare
