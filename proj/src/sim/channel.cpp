#include "eldercare/sim/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eldercare::sim {

void ChannelParams::validate(std::string_view name) const {
  const std::string n(name);
  if (!(mean_ms > 0.0)) throw std::invalid_argument(n + ": mean latency must be positive");
  if (!(jitter_ms >= 0.0 && jitter_ms < mean_ms)) {
    throw std::invalid_argument(n + ": jitter must be in [0, mean)");
  }
  if (!(success >= 0.0 && success <= 1.0)) {
    throw std::invalid_argument(n + ": success probability must be in [0, 1]");
  }
}

const ChannelParams& ChannelModel::params(Channel c) const {
  switch (c) {
    case Channel::Sms: return sms;
    case Channel::Push: return push;
    case Channel::Call: return call;
  }
  throw std::invalid_argument("unknown channel");
}

ChannelParams& ChannelModel::params(Channel c) {
  return const_cast<ChannelParams&>(std::as_const(*this).params(c));
}

void ChannelModel::validate() const {
  sms.validate("sms");
  push.validate("push");
  call.validate("call");
}

ChannelOutcome simulate_channel(const ChannelParams& params, SimRng& rng) {
  const double jitter = rng.uniform(-params.jitter_ms, params.jitter_ms);
  ChannelOutcome out;
  out.latency_ms = std::llround(params.mean_ms + jitter);
  out.delivered = rng.bernoulli(params.success);
  return out;
}

}  // namespace eldercare::sim
