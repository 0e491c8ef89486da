#include "eldercare/uplink.hpp"

#include <stdexcept>

#include "json.hpp"

namespace eldercare {

std::string_view to_string(Topic t) {
  switch (t) {
    case Topic::Status: return "status";
    case Topic::Data: return "data";
    case Topic::Alert: return "alert";
    case Topic::Cmd: return "cmd";
  }
  return "?";
}

std::string topic_for(std::string_view gateway_id, Topic t) {
  std::string s(gateway_id);
  s += '/';
  s += to_string(t);
  return s;
}

std::optional<std::pair<std::string, Topic>> parse_topic(std::string_view topic) {
  const auto slash = topic.rfind('/');
  if (slash == std::string_view::npos || slash == 0) return std::nullopt;
  const auto suffix = topic.substr(slash + 1);
  for (auto t : {Topic::Status, Topic::Data, Topic::Alert, Topic::Cmd}) {
    if (to_string(t) == suffix) return std::pair{std::string(topic.substr(0, slash)), t};
  }
  return std::nullopt;
}

OfflineBuffer::OfflineBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("offline buffer capacity must be positive");
}

std::optional<UplinkEnvelope> OfflineBuffer::push(UplinkEnvelope envelope) {
  std::optional<UplinkEnvelope> evicted;
  if (queue_.size() == capacity_) {
    evicted = std::move(queue_.front());
    queue_.pop_front();
    ++drops_;
  }
  queue_.push_back(std::move(envelope));
  return evicted;
}

std::vector<UplinkEnvelope> OfflineBuffer::drain() {
  std::vector<UplinkEnvelope> out(std::make_move_iterator(queue_.begin()),
                                  std::make_move_iterator(queue_.end()));
  queue_.clear();
  return out;
}

std::vector<UplinkEnvelope> replay_on_reconnect(OfflineBuffer& buffer) { return buffer.drain(); }

UplinkClient::UplinkClient(UplinkConfig config, Millis started_at)
    : config_(std::move(config)), started_at_(started_at), buffer_(config_.buffer_capacity) {
  if (config_.gateway_id.empty() || config_.gateway_id.find('/') != std::string::npos) {
    throw std::invalid_argument("gateway id must be non-empty and contain no '/'");
  }
  if (config_.transit_ms < 0) throw std::invalid_argument("uplink transit must be non-negative");
}

UplinkEnvelope UplinkClient::make_envelope(Topic topic, std::string payload, Millis now) {
  return {topic_for(config_.gateway_id, topic), std::move(payload), now, next_sequence_++};
}

PublishOutcome UplinkClient::publish(UplinkEnvelope envelope, Millis now) {
  auto parsed = parse_topic(envelope.topic);
  if (!parsed || parsed->first != config_.gateway_id) {
    throw std::invalid_argument("envelope topic does not belong to this gateway: " + envelope.topic);
  }
  if (link_up_) {
    send(envelope, now, "sent");
    return PublishOutcome::Sent;
  }
  log(envelope, std::nullopt, "buffered");
  if (auto evicted = buffer_.push(std::move(envelope))) log(*evicted, std::nullopt, "dropped");
  return PublishOutcome::Buffered;
}

UplinkEnvelope UplinkClient::heartbeat(Millis now) {
  nlohmann::ordered_json j;
  j["uptime_ms"] = now - started_at_;
  j["buffer_depth"] = buffer_.size();
  j["drops"] = buffer_.drop_count();
  return make_envelope(Topic::Status, j.dump(), now);
}

std::vector<UplinkEnvelope> UplinkClient::set_link(bool up, Millis now) {
  const bool reconnect = up && !link_up_;
  link_up_ = up;
  if (!reconnect) return {};
  auto replayed = replay_on_reconnect(buffer_);
  for (const auto& e : replayed) send(e, now, "replayed");
  return replayed;
}

void UplinkClient::receive_command(const UplinkEnvelope& envelope, Millis now) {
  log(envelope, now, "cmd_logged");
}

void UplinkClient::send(const UplinkEnvelope& envelope, Millis now, std::string_view outcome) {
  delivered_.push_back({envelope, now, now + config_.transit_ms});
  log(envelope, now, outcome);
}

void UplinkClient::log(const UplinkEnvelope& envelope, std::optional<Millis> sent_at,
                       std::string_view outcome) {
  nlohmann::ordered_json j;
  j["topic"] = envelope.topic;
  j["sequence"] = envelope.sequence;
  j["enqueued_at"] = envelope.enqueued_at;
  j["sent_at"] = sent_at ? nlohmann::ordered_json(*sent_at) : nlohmann::ordered_json(nullptr);
  j["outcome"] = outcome;
  transcript_.push_back(j.dump());
}

}  // namespace eldercare
