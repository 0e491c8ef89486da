#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "eldercare/sim/trace.hpp"

namespace eldercare::sim {

enum class ScenarioKind : std::uint8_t { Normal, Fall, Hypoxia, Wandering, Outage };

std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario(std::string_view s);

struct ScenarioOptions {
  int imu_hz = 20;
};

/// Synthetic household trace, deterministic in (kind, duration, seed).
///   normal    upright walking / standing / sitting, steady vitals
///   fall      walking, free fall, impact (>3 g), then lying still; HR rises
///   hypoxia   quiet sitting, then SpO2 ramps 97 -> 86 over five seconds
///   wandering rapid activity switching, no room sensors, intensity > 0.5
///   outage    normal plus one uplink outage over the middle fifth
Trace generate_scenario(ScenarioKind kind, double duration_s, std::uint64_t seed,
                        const ScenarioOptions& options = {});

/// Wall-clock moment the fall begins in a fall scenario of this length.
Millis fall_onset_ms(double duration_s);

}  // namespace eldercare::sim
