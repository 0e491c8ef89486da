#include "eldercare/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace eldercare {

SensorWeightTable::SensorWeightTable()
    : weights_{{SensorType::Wristband, 1.0},
               {SensorType::Camera, 0.9},
               {SensorType::Motion, 0.8},
               {SensorType::Bed, 0.6}} {}

SensorWeightTable::SensorWeightTable(std::map<SensorType, double> weights) {
  for (auto [type, w] : weights) set(type, w);
}

double SensorWeightTable::weight(SensorType type) const {
  auto it = weights_.find(type);
  return it == weights_.end() ? 0.0 : it->second;
}

void SensorWeightTable::set(SensorType type, double weight) {
  if (type == SensorType::Door) throw std::invalid_argument("door sensors have no fusion weight");
  if (!(weight > 0.0 && weight <= 1.0)) {
    throw std::invalid_argument("sensor weight must lie in (0, 1]");
  }
  weights_[type] = weight;
}

double fuse_scalar(std::span<const WeightedValue> measurements) {
  if (measurements.empty()) throw NoDataError("no measurements to fuse");
  double num = 0.0;
  double den = 0.0;
  for (const auto& m : measurements) {
    if (!(m.weight > 0.0)) throw std::invalid_argument("fusion weight must be positive");
    num += m.weight * m.value;
    den += m.weight;
  }
  return num / den;
}

double compute_confidence(std::size_t n_sources) {
  return std::min(0.95, 0.5 + static_cast<double>(n_sources) * 0.1);
}

MotionIntensity motion_intensity(std::span<const Vec3> accel) {
  if (accel.size() < 2) return {};
  double sum = 0.0;
  double prev = accel.front().norm();
  for (std::size_t i = 1; i < accel.size(); ++i) {
    const double cur = accel[i].norm();
    sum += std::abs(cur - prev);
    prev = cur;
  }
  const double raw = sum / static_cast<double>(accel.size() - 1) / kIntensityScale;
  return {std::min(1.0, raw), raw};
}

bool detect_accel_drop(std::span<const TimedAccel> series, double threshold,
                       Millis min_duration) {
  std::optional<Millis> run_start;
  for (const auto& s : series) {
    if (s.accel.norm() < threshold) {
      if (!run_start) run_start = s.t;
      if (s.t - *run_start >= min_duration) return true;
    } else {
      run_start.reset();
    }
  }
  return false;
}

std::optional<double> tilt_from_vertical(const Vec3& v) {
  const double n = v.norm();
  if (n == 0.0) return std::nullopt;
  const double c = std::clamp(v.z / n, -1.0, 1.0);
  const double deg = std::acos(c) * 180.0 / std::numbers::pi;
  // Round away last-ulp noise from acos so exact boundary angles classify
  // deterministically.
  return std::round(deg * 1e9) / 1e9;
}

Posture posture_from_tilt(double tilt_deg) {
  if (tilt_deg < 30.0) return Posture::Standing;
  if (tilt_deg <= 60.0) return Posture::Sitting;
  return Posture::Lying;
}

PostureEstimate estimate_posture(std::span<const Vec3> trailing_accel,
                                 std::span<const PostureVote> camera_votes,
                                 double accel_weight) {
  PostureEstimate out;
  std::map<Posture, double> tally;

  if (!trailing_accel.empty()) {
    Vec3 sum;
    double mag = 0.0;
    for (const auto& a : trailing_accel) {
      sum += a;
      mag += a.norm();
    }
    const double n = static_cast<double>(trailing_accel.size());
    const Vec3 mean = sum * (1.0 / n);
    out.tilt_deg = tilt_from_vertical(mean);
    if (mag / n < 0.5 * kGravity) {
      tally[Posture::Falling] += accel_weight;
    } else if (out.tilt_deg) {
      tally[posture_from_tilt(*out.tilt_deg)] += accel_weight;
    }
  }

  if (!camera_votes.empty()) {
    // Camera estimates collapse into one vote for their consensus posture.
    std::map<Posture, double> cam;
    double weight_sum = 0.0;
    for (const auto& v : camera_votes) {
      cam[v.posture] += 1.0;
      weight_sum += v.weight;
    }
    auto best = std::max_element(cam.begin(), cam.end(), [](const auto& a, const auto& b) {
      return a.second < b.second;
    });
    if (best->first != Posture::Unknown) {
      tally[best->first] += weight_sum / static_cast<double>(camera_votes.size());
    }
  }

  if (!tally.empty()) {
    auto best = std::max_element(tally.begin(), tally.end(), [](const auto& a, const auto& b) {
      return a.second < b.second;
    });
    out.posture = best->first;
  }
  return out;
}

Activity classify_activity(double intensity, bool drop, Posture posture) {
  if (drop) return Activity::Falling;
  if (posture == Posture::Lying && intensity < 0.1) return Activity::Lying;
  if (intensity < 0.1) return Activity::Stationary;
  if (intensity < 0.3) return Activity::Sitting;
  if (intensity < 0.5) return Activity::Walking;
  return Activity::Running;
}

namespace {

double population_stddev(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / n);
}

template <typename Container>
std::span<const double> tail(const Container& c, std::size_t n) {
  std::span<const double> s(c);
  return s.size() <= n ? s : s.subspan(s.size() - n);
}

}  // namespace

AnomalyResult detect_anomalies(std::span<const double> hr_history,
                               std::span<const double> spo2_history, double raw_intensity,
                               std::span<const double> prev_intensities,
                               const AnomalyConstants& k) {
  AnomalyResult out;
  double sum = 0.0;

  if (!hr_history.empty()) {
    const double hr = hr_history.back();
    bool flag = hr < k.hr_low || hr > k.hr_high;
    if (!flag && hr_history.size() >= 10) {
      flag = population_stddev(tail(hr_history, 10)) > k.hr_stddev;
    }
    if (flag) {
      out.flags.insert(AnomalyFlag::HeartRate);
      sum += k.hr_contribution;
    }
  }

  if (!spo2_history.empty()) {
    const double spo2 = spo2_history.back();
    bool flag = spo2 < k.spo2_low;
    if (!flag && spo2_history.size() >= 5) {
      auto last5 = tail(spo2_history, 5);
      flag = last5.front() - last5.back() > k.spo2_drop;
    }
    if (flag) {
      out.flags.insert(AnomalyFlag::SpO2);
      sum += k.spo2_contribution;
    }
  }

  bool motion = raw_intensity > k.motion_raw_limit;
  if (!motion && prev_intensities.size() >= 3) {
    auto prev = tail(prev_intensities, 3);
    const double mean = std::accumulate(prev.begin(), prev.end(), 0.0) / 3.0;
    motion = mean > k.active_mean && std::min(1.0, raw_intensity) < k.still_after_active;
  }
  if (motion) {
    out.flags.insert(AnomalyFlag::Motion);
    sum += k.motion_contribution;
  }

  out.score = std::min(1.0, sum);
  return out;
}

void VitalsHistory::record(const FusionResult& result) {
  auto push = [](std::deque<double>& q, double v, std::size_t cap) {
    q.push_back(v);
    while (q.size() > cap) q.pop_front();
  };
  if (result.heart_rate) push(heart_rate, *result.heart_rate, 10);
  if (result.spo2) push(spo2, *result.spo2, 5);
  push(intensities, result.motion_intensity, 3);
}

namespace {

const SensorReading* latest_of(const FusionWindow& window, std::initializer_list<SensorType> types) {
  const SensorReading* best = nullptr;
  for (auto type : types) {
    auto it = window.readings_by_type.find(type);
    if (it == window.readings_by_type.end() || it->second.empty()) continue;
    const auto& r = it->second.back();
    if (!best || r.timestamp >= best->timestamp) best = &r;
  }
  return best;
}

}  // namespace

FusionResult fuse_window(const FusionWindow& window, const FusionConfig& config,
                         const VitalsHistory& history) {
  FusionResult out;
  out.window_end = window.window_end;
  const auto& weights = config.weights;

  std::vector<WeightedValue> hr_values;
  std::vector<WeightedValue> spo2_values;
  std::map<std::string, std::vector<Vec3>> imu_by_sensor;
  std::map<std::string, SensorType> imu_type;
  std::vector<TimedAccel> body_series;
  std::vector<Vec3> body_trailing;
  std::vector<Vec3> fixed_trailing;
  std::vector<PostureVote> camera_votes;
  std::size_t contributing_types = 0;
  const Millis trailing_from = window.window_end - config.posture_window_ms;

  for (const auto& [type, readings] : window.readings_by_type) {
    if (weights.has_weight(type) && !readings.empty()) ++contributing_types;
    const double w = weights.weight(type);
    for (const auto& r : readings) {
      if (const auto* imu = std::get_if<ImuPayload>(&r.payload)) {
        imu_by_sensor[r.sensor_id].push_back(imu->accel);
        imu_type[r.sensor_id] = type;
        if (type == SensorType::Wristband) {
          body_series.push_back({r.timestamp, imu->accel});
          if (r.timestamp >= trailing_from) body_trailing.push_back(imu->accel);
        } else if (r.timestamp >= trailing_from) {
          fixed_trailing.push_back(imu->accel);
        }
      } else if (const auto* v = std::get_if<VitalsPayload>(&r.payload)) {
        if (v->heart_rate) hr_values.push_back({*v->heart_rate, w});
        if (v->spo2) spo2_values.push_back({*v->spo2, w});
      } else if (const auto* p = std::get_if<PostureEstimatePayload>(&r.payload)) {
        if (r.timestamp >= trailing_from) camera_votes.push_back({p->posture, w});
      }
    }
  }

  if (!hr_values.empty()) out.heart_rate = fuse_scalar(hr_values);
  if (!spo2_values.empty()) out.spo2 = fuse_scalar(spo2_values);

  // Intensity is computed per sensor stream, then fused by type weight. Room
  // sensors only stand in when nothing body-worn reported.
  std::vector<WeightedValue> raw_values;
  for (bool worn : {true, false}) {
    for (const auto& [id, series] : imu_by_sensor) {
      if (series.size() < 2 || (imu_type[id] == SensorType::Wristband) != worn) continue;
      raw_values.push_back({motion_intensity(series).raw, weights.weight(imu_type[id])});
    }
    if (!raw_values.empty()) break;
  }
  out.raw_intensity = raw_values.empty() ? 0.0 : fuse_scalar(raw_values);
  out.motion_intensity = std::min(1.0, out.raw_intensity);

  out.accel_drop = detect_accel_drop(body_series);

  const bool body_worn = !body_trailing.empty();
  const auto posture = estimate_posture(
      body_worn ? body_trailing : fixed_trailing, camera_votes,
      weights.weight(body_worn ? SensorType::Wristband : SensorType::Motion));
  out.posture = posture.posture;
  out.tilt_deg = posture.tilt_deg;
  out.activity = classify_activity(out.motion_intensity, out.accel_drop, out.posture);

  if (const auto* loc = latest_of(window, {SensorType::Motion, SensorType::Door})) {
    if (auto it = config.sensor_rooms.find(loc->sensor_id); it != config.sensor_rooms.end()) {
      out.location = it->second;
    }
  }

  std::vector<double> hr_hist;
  if (out.heart_rate) {
    hr_hist.assign(history.heart_rate.begin(), history.heart_rate.end());
    hr_hist.push_back(*out.heart_rate);
  }
  std::vector<double> spo2_hist;
  if (out.spo2) {
    spo2_hist.assign(history.spo2.begin(), history.spo2.end());
    spo2_hist.push_back(*out.spo2);
  }
  const std::vector<double> prev(history.intensities.begin(), history.intensities.end());
  auto anomalies = detect_anomalies(hr_hist, spo2_hist, out.raw_intensity, prev, config.anomaly);
  out.anomaly_score = anomalies.score;
  out.anomaly_flags = std::move(anomalies.flags);

  out.confidence = compute_confidence(contributing_types);
  return out;
}

}  // namespace eldercare
