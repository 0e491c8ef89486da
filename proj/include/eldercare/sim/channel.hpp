#pragma once

#include "eldercare/escalation.hpp"
#include "eldercare/sim/rng.hpp"

namespace eldercare::sim {

struct ChannelParams {
  double mean_ms = 0.0;
  double jitter_ms = 0.0;  // half-width of the uniform jitter
  double success = 1.0;

  void validate(std::string_view name) const;
};

struct ChannelModel {
  ChannelParams sms{1500.0, 300.0, 0.985};
  ChannelParams push{800.0, 200.0, 0.995};
  ChannelParams call{3000.0, 500.0, 0.95};

  const ChannelParams& params(Channel c) const;
  ChannelParams& params(Channel c);
  void validate() const;
};

struct ChannelOutcome {
  Millis latency_ms = 0;
  bool delivered = false;
};

/// Latency is mean + U(-jitter, +jitter), rounded to whole milliseconds;
/// failures still take that long. Draws latency first, then success.
ChannelOutcome simulate_channel(const ChannelParams& params, SimRng& rng);

inline ChannelOutcome simulate_channel(Channel channel, const ChannelModel& model, SimRng& rng) {
  return simulate_channel(model.params(channel), rng);
}

}  // namespace eldercare::sim
