#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "eldercare/escalation.hpp"
#include "eldercare/fusion.hpp"
#include "eldercare/inference.hpp"
#include "eldercare/risk.hpp"
#include "eldercare/sim/channel.hpp"
#include "eldercare/uplink.hpp"
#include "eldercare/window_manager.hpp"

namespace eldercare::sim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulated compute and transport time per pipeline stage.
struct StageLatencies {
  Millis ble = 30;
  Millis fusion = 15;
  Millis inference_rule = 5;
  Millis inference_dl = 100;
  Millis risk = 10;
  Millis dispatch = 0;
};

enum class InferenceMode : std::uint8_t { Rule, DeepLearning };

struct Outage {
  Millis start_ms = 0;
  Millis end_ms = 0;  // exclusive

  friend bool operator==(const Outage&, const Outage&) = default;
};

struct SimConfig {
  std::uint64_t seed = 1;
  std::string elder_id = "elder-1";
  Millis clock_anchor_ms = 8 * 3600'000;  // time of day at trace t = 0

  WindowConfig window;
  FusionConfig fusion;
  RiskConfig risk;
  QuietHours quiet_hours;

  Point elder_location;
  double volunteer_radius_m = kDefaultVolunteerRadius;
  double volunteer_accept_probability = 0.7;
  Millis dedup_window_ms = 60'000;
  std::vector<Contact> contacts;

  ChannelModel channels;
  std::vector<Channel> closed_channels;
  StageLatencies stages;
  InferenceMode inference_mode = InferenceMode::Rule;

  UplinkConfig uplink;
  Millis heartbeat_interval_ms = 60'000;
  std::vector<Outage> outages;

  std::vector<Millis> manual_triggers_ms;

  Millis inference_latency() const {
    return inference_mode == InferenceMode::Rule ? stages.inference_rule : stages.inference_dl;
  }

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Defaults plus the household used by the generated scenarios.
SimConfig default_config();

/// Missing keys keep their defaults; unknown keys are rejected.
SimConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const SimConfig& config);
SimConfig load_config(const std::filesystem::path& path);

/// "HH:MM" -> milliseconds since midnight.
Millis parse_clock(const std::string& hhmm);
std::string format_clock(Millis ms_of_day);

}  // namespace eldercare::sim
