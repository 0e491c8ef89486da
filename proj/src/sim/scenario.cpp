#include "eldercare/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "eldercare/sim/rng.hpp"

namespace eldercare::sim {

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Normal: return "normal";
    case ScenarioKind::Fall: return "fall";
    case ScenarioKind::Hypoxia: return "hypoxia";
    case ScenarioKind::Wandering: return "wandering";
    case ScenarioKind::Outage: return "outage";
  }
  return "?";
}

std::optional<ScenarioKind> parse_scenario(std::string_view s) {
  for (auto k : {ScenarioKind::Normal, ScenarioKind::Fall, ScenarioKind::Hypoxia,
                 ScenarioKind::Wandering, ScenarioKind::Outage}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

Millis fall_onset_ms(double duration_s) {
  const auto secs = static_cast<Millis>(std::max(20.0, std::floor(duration_s / 4.0)));
  return secs * 1000 + 200;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSitTilt = 40.0 * std::numbers::pi / 180.0;

enum class Motion { Standing, Walking, Sitting, Lying };

struct Segment {
  Millis start;
  Millis end;
  Motion motion;
};

class Builder {
 public:
  Builder(Millis duration, std::uint64_t seed, const ScenarioOptions& opt)
      : duration_(duration), rng_(seed), imu_step_(1000 / std::max(1, opt.imu_hz)) {}

  double noise(double half) { return rng_.uniform(-half, half); }

  Vec3 body_accel(Motion m, Millis t) {
    const double s = static_cast<double>(t) / 1000.0;
    switch (m) {
      case Motion::Walking:
        return {0.5 * std::sin(kTwoPi * s) + noise(0.05), noise(0.05),
                kGravity + 4.0 * std::sin(kTwoPi * 2.0 * s) + noise(0.05)};
      case Motion::Sitting:
        return {kGravity * std::sin(kSitTilt) + noise(0.05), noise(0.05),
                kGravity * std::cos(kSitTilt) + noise(0.05)};
      case Motion::Lying:
        return {kGravity + noise(0.02), noise(0.02), noise(0.02)};
      case Motion::Standing:
      default:
        return {noise(0.05), noise(0.05), kGravity + noise(0.05)};
    }
  }

  static Posture posture_of(Motion m) {
    switch (m) {
      case Motion::Sitting: return Posture::Sitting;
      case Motion::Lying: return Posture::Lying;
      default: return Posture::Standing;
    }
  }

  void imu(Millis t, const Vec3& a, const std::string& id = "wb-1") {
    Vec3 gyro{noise(2.0), noise(2.0), noise(2.0)};
    trace_.readings.push_back({t, id, SensorType::Wristband, ImuPayload{a, gyro}});
  }

  void vitals(Millis t, double hr, double spo2) {
    trace_.readings.push_back({t, "wb-1", SensorType::Wristband, VitalsPayload{hr, spo2}});
  }

  void room_ping(Millis t) {
    trace_.readings.push_back(
        {t, "motion-living", SensorType::Motion, ImuPayload{{0.0, 0.0, kGravity}, {}}});
  }

  void camera(Millis t, Posture p) {
    trace_.readings.push_back(
        {t, "camera-living", SensorType::Camera, PostureEstimatePayload{p, 0.8}});
  }

  void door(Millis t, bool opened) {
    trace_.readings.push_back({t, "door-front", SensorType::Door, DoorEventPayload{opened}});
  }

  /// Body IMU from the segment list plus the household's ambient sensors.
  void household(const std::vector<Segment>& segments,
                 const std::function<double(Millis)>& hr_at,
                 const std::function<double(Millis)>& spo2_at) {
    door(400, true);
    door(2400, false);
    auto seg = segments.begin();
    for (Millis t = 0; t <= duration_; t += imu_step_) {
      while (seg != segments.end() && t >= seg->end) ++seg;
      const Motion m = seg == segments.end() ? segments.back().motion : seg->motion;
      imu(t, body_accel(m, t));
      if (t % 1000 == 0) {
        vitals(t, hr_at(t), spo2_at(t));
        camera(t, posture_of(m));
        if (t % 2000 == 0) room_ping(t);
      }
    }
  }

  std::vector<Segment> daily_routine() {
    std::vector<Segment> out;
    Millis t = 0;
    Motion m = Motion::Standing;
    while (t < duration_ + 1000) {
      const Millis len = 20'000 + static_cast<Millis>(rng_.uniform(0.0, 40'000.0)) / 1000 * 1000;
      out.push_back({t, t + len, m});
      t += len;
      // Standing sits between every walk and sit so tilt changes stay small.
      if (m == Motion::Standing) {
        m = rng_.bernoulli(0.5) ? Motion::Walking : Motion::Sitting;
      } else {
        m = Motion::Standing;
      }
    }
    return out;
  }

  Trace finish() {
    std::stable_sort(trace_.readings.begin(), trace_.readings.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return std::move(trace_);
  }

  Trace& trace() { return trace_; }
  SimRng& rng() { return rng_; }
  Millis duration() const { return duration_; }
  Millis imu_step() const { return imu_step_; }

 private:
  Millis duration_;
  SimRng rng_;
  Millis imu_step_;
  Trace trace_;
};

Trace normal(Builder& b) {
  auto segments = b.daily_routine();
  auto& rng = b.rng();
  b.household(
      segments, [&](Millis) { return 72.0 + rng.uniform(-3.0, 3.0); },
      [&](Millis) { return 97.0 + rng.uniform(-0.5, 0.5); });
  return b.finish();
}

Trace fall(Builder& b, double duration_s) {
  const Millis onset = fall_onset_ms(duration_s);
  const Millis impact = onset + 300;
  const Millis rest = onset + 800;
  auto& rng = b.rng();
  b.door(400, true);
  b.door(2400, false);
  for (Millis t = 0; t <= b.duration(); t += b.imu_step()) {
    Vec3 a;
    Posture seen = Posture::Standing;
    if (t < onset) {
      a = b.body_accel(Motion::Walking, t);
    } else if (t < impact) {
      a = {0.3 + b.noise(0.1), 0.2 + b.noise(0.1), 1.2 + b.noise(0.1)};  // free fall, < 0.5 g
      seen = Posture::Falling;
    } else if (t < rest) {
      const bool peak = ((t - impact) / b.imu_step()) % 2 == 0;
      a = peak ? Vec3{35.0, 1.0, 2.0} : Vec3{5.0, 0.5, 1.0};  // impact bounces, > 3 g
      seen = Posture::Falling;
    } else {
      a = b.body_accel(Motion::Lying, t);
      seen = Posture::Lying;
    }
    b.imu(t, a);
    if (t % 1000 == 0) {
      const double hr = t < onset + 1000 ? 72.0 + rng.uniform(-3.0, 3.0) : 126.0 + rng.uniform(-2.0, 2.0);
      b.vitals(t, hr, 97.0 + rng.uniform(-0.5, 0.5));
      b.camera(t, seen);
      if (t % 2000 == 0) b.room_ping(t);
    }
  }
  return b.finish();
}

Trace hypoxia(Builder& b) {
  const Millis ramp_start = std::max<Millis>(20'000, b.duration() / 3 / 1000 * 1000);
  auto& rng = b.rng();
  b.household(
      {{0, b.duration() + 1000, Motion::Sitting}},
      [&](Millis) { return 74.0 + rng.uniform(-2.0, 2.0); },
      [&](Millis t) {
        if (t < ramp_start) return 97.0 + rng.uniform(-0.3, 0.3);
        const double steps = std::min(5.0, static_cast<double>(t - ramp_start) / 1000.0);
        return 97.0 - 11.0 * steps / 5.0;
      });
  return b.finish();
}

Trace wandering(Builder& b) {
  // Magnitudes stay above the drop threshold; the sample-to-sample swing sets
  // the intensity level of each two-second segment.
  constexpr double kLevels[] = {0.7, 0.4, 0.2, 0.0};
  auto& rng = b.rng();
  std::size_t n = 0;
  for (Millis t = 0; t <= b.duration(); t += b.imu_step(), ++n) {
    const double level = kLevels[(t / 2000) % 4];
    const double mag = 16.0 + ((n % 2) ? 5.0 * level : 0.0);
    b.imu(t, {0.0, 0.0, mag});
    if (t % 1000 == 0) b.vitals(t, 88.0 + rng.uniform(-3.0, 3.0), 96.0 + rng.uniform(-0.5, 0.5));
  }
  return b.finish();
}

}  // namespace

Trace generate_scenario(ScenarioKind kind, double duration_s, std::uint64_t seed,
                        const ScenarioOptions& options) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("scenario duration must be positive");
  if (options.imu_hz <= 0 || options.imu_hz > 1000) {
    throw std::invalid_argument("imu rate must be in (0, 1000] Hz");
  }
  const auto duration = static_cast<Millis>(std::llround(duration_s * 1000.0));
  Builder b(duration, seed, options);
  switch (kind) {
    case ScenarioKind::Normal: return normal(b);
    case ScenarioKind::Fall: return fall(b, duration_s);
    case ScenarioKind::Hypoxia: return hypoxia(b);
    case ScenarioKind::Wandering: return wandering(b);
    case ScenarioKind::Outage: {
      auto t = normal(b);
      const Millis start = duration * 2 / 5 / 1000 * 1000;
      const Millis end = duration * 3 / 5 / 1000 * 1000;
      if (end > start) t.outages.push_back({start, end});
      return t;
    }
  }
  throw std::invalid_argument("unknown scenario");
}

}  // namespace eldercare::sim
