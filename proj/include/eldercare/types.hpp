#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace eldercare {

/// Milliseconds since the start of a trace.
using Millis = std::int64_t;

enum class SensorType : std::uint8_t { Wristband, Motion, Camera, Door, Bed };

inline constexpr std::array<SensorType, 5> kAllSensorTypes = {
    SensorType::Wristband, SensorType::Motion, SensorType::Camera,
    SensorType::Door, SensorType::Bed};

enum class Posture : std::uint8_t { Standing, Sitting, Lying, Falling, Unknown };

enum class Activity : std::uint8_t { Stationary, Sitting, Walking, Running, Falling, Lying };

enum class AnomalyFlag : std::uint8_t { HeartRate, SpO2, Motion };

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Vec3 operator*(const Vec3& v, double s) { return {v.x * s, v.y * s, v.z * s}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct ImuPayload {
  Vec3 accel;  // m/s^2
  Vec3 gyro;   // deg/s
  friend bool operator==(const ImuPayload&, const ImuPayload&) = default;
};

struct VitalsPayload {
  std::optional<double> heart_rate;  // bpm
  std::optional<double> spo2;        // percent
  friend bool operator==(const VitalsPayload&, const VitalsPayload&) = default;
};

struct PostureEstimatePayload {
  Posture posture = Posture::Unknown;
  double confidence = 0.0;
  friend bool operator==(const PostureEstimatePayload&, const PostureEstimatePayload&) = default;
};

struct DoorEventPayload {
  bool opened = false;
  friend bool operator==(const DoorEventPayload&, const DoorEventPayload&) = default;
};

struct BedPresencePayload {
  bool present = false;
  friend bool operator==(const BedPresencePayload&, const BedPresencePayload&) = default;
};

using Payload = std::variant<ImuPayload, VitalsPayload, PostureEstimatePayload,
                             DoorEventPayload, BedPresencePayload>;

struct SensorReading {
  Millis timestamp = 0;
  std::string sensor_id;
  SensorType sensor_type = SensorType::Wristband;
  Payload payload;

  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

/// Checks the timestamp and payload/type pairing. Returns an empty string when
/// the reading is well-formed, otherwise the reason it is not.
std::string validate(const SensorReading& reading);

/// Per-window output of the fusion engine.
struct FusionResult {
  Millis window_end = 0;
  Activity activity = Activity::Stationary;
  Posture posture = Posture::Unknown;
  std::optional<double> heart_rate;
  std::optional<double> spo2;
  double motion_intensity = 0.0;  // min(1, raw_intensity)
  double raw_intensity = 0.0;
  std::optional<double> tilt_deg;  // gravity angle behind the posture vote
  bool accel_drop = false;
  std::string location = "unknown";
  double anomaly_score = 0.0;
  std::set<AnomalyFlag> anomaly_flags;
  double confidence = 0.5;

  bool anomalous() const { return anomaly_score >= 0.5; }
  friend bool operator==(const FusionResult&, const FusionResult&) = default;
};

inline constexpr std::string_view kUnknownLocation = "unknown";

std::string_view to_string(SensorType t);
std::string_view to_string(Posture p);
std::string_view to_string(Activity a);
std::string_view to_string(AnomalyFlag f);

std::optional<SensorType> parse_sensor_type(std::string_view s);
std::optional<Posture> parse_posture(std::string_view s);

}  // namespace eldercare
