#include "eldercare/types.hpp"

#include <cmath>

namespace eldercare {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

std::string validate(const SensorReading& reading) {
  if (reading.timestamp < 0) return "negative timestamp";
  const auto& p = reading.payload;
  bool ok = false;
  switch (reading.sensor_type) {
    case SensorType::Wristband:
      ok = std::holds_alternative<ImuPayload>(p) || std::holds_alternative<VitalsPayload>(p);
      break;
    case SensorType::Motion:
      ok = std::holds_alternative<ImuPayload>(p);
      break;
    case SensorType::Camera:
      ok = std::holds_alternative<PostureEstimatePayload>(p);
      break;
    case SensorType::Door:
      ok = std::holds_alternative<DoorEventPayload>(p);
      break;
    case SensorType::Bed:
      ok = std::holds_alternative<BedPresencePayload>(p);
      break;
  }
  if (!ok) return "payload does not match sensor type " + std::string(to_string(reading.sensor_type));
  return {};
}

std::string_view to_string(SensorType t) {
  switch (t) {
    case SensorType::Wristband: return "wristband";
    case SensorType::Motion: return "motion";
    case SensorType::Camera: return "camera";
    case SensorType::Door: return "door";
    case SensorType::Bed: return "bed";
  }
  return "?";
}

std::string_view to_string(Posture p) {
  switch (p) {
    case Posture::Standing: return "standing";
    case Posture::Sitting: return "sitting";
    case Posture::Lying: return "lying";
    case Posture::Falling: return "falling";
    case Posture::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(Activity a) {
  switch (a) {
    case Activity::Stationary: return "stationary";
    case Activity::Sitting: return "sitting";
    case Activity::Walking: return "walking";
    case Activity::Running: return "running";
    case Activity::Falling: return "falling";
    case Activity::Lying: return "lying";
  }
  return "?";
}

std::string_view to_string(AnomalyFlag f) {
  switch (f) {
    case AnomalyFlag::HeartRate: return "heart_rate";
    case AnomalyFlag::SpO2: return "spo2";
    case AnomalyFlag::Motion: return "motion";
  }
  return "?";
}

std::optional<SensorType> parse_sensor_type(std::string_view s) {
  for (auto t : kAllSensorTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<Posture> parse_posture(std::string_view s) {
  for (auto p : {Posture::Standing, Posture::Sitting, Posture::Lying, Posture::Falling,
                 Posture::Unknown}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

}  // namespace eldercare
