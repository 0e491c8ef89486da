#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eldercare/types.hpp"

namespace eldercare {

enum class Topic : std::uint8_t { Status, Data, Alert, Cmd };

std::string_view to_string(Topic t);

/// "<gateway_id>/<suffix>"
std::string topic_for(std::string_view gateway_id, Topic t);

/// Splits a topic back into gateway id and suffix; nullopt if the suffix is
/// not one of status/data/alert/cmd.
std::optional<std::pair<std::string, Topic>> parse_topic(std::string_view topic);

struct UplinkEnvelope {
  std::string topic;
  std::string payload;
  Millis enqueued_at = 0;
  std::uint64_t sequence = 0;
};

/// Bounded FIFO; when full the oldest envelope is evicted and counted.
class OfflineBuffer {
 public:
  static constexpr std::size_t kDefaultCapacity = 1000;

  explicit OfflineBuffer(std::size_t capacity = kDefaultCapacity);

  /// Returns the evicted envelope, if any.
  std::optional<UplinkEnvelope> push(UplinkEnvelope envelope);
  std::vector<UplinkEnvelope> drain();

  std::size_t size() const { return queue_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t drop_count() const { return drops_; }
  bool empty() const { return queue_.empty(); }

 private:
  std::size_t capacity_;
  std::deque<UplinkEnvelope> queue_;
  std::size_t drops_ = 0;
};

/// Empties the buffer in enqueue order.
std::vector<UplinkEnvelope> replay_on_reconnect(OfflineBuffer& buffer);

enum class PublishOutcome : std::uint8_t { Sent, Buffered };

struct Delivery {
  UplinkEnvelope envelope;
  Millis sent_at = 0;
  Millis arrived_at = 0;
};

struct UplinkConfig {
  std::string gateway_id = "gw1";
  Millis transit_ms = 50;
  std::size_t buffer_capacity = OfflineBuffer::kDefaultCapacity;
};

/// Gateway side of the gateway-to-cloud link. Everything that reaches the
/// simulated cloud is kept in delivered() for inspection.
class UplinkClient {
 public:
  explicit UplinkClient(UplinkConfig config = {}, Millis started_at = 0);

  /// Stamps the next sequence number.
  UplinkEnvelope make_envelope(Topic topic, std::string payload, Millis now);

  PublishOutcome publish(UplinkEnvelope envelope, Millis now);

  /// Status envelope with uptime and current buffer depth (not yet published).
  UplinkEnvelope heartbeat(Millis now);

  /// Link transitions. Going up replays the buffer and returns what was sent.
  std::vector<UplinkEnvelope> set_link(bool up, Millis now);

  /// Cloud-to-gateway commands are recorded only.
  void receive_command(const UplinkEnvelope& envelope, Millis now);

  bool link_up() const { return link_up_; }
  const OfflineBuffer& buffer() const { return buffer_; }
  std::size_t drop_count() const { return buffer_.drop_count(); }
  const std::vector<Delivery>& delivered() const { return delivered_; }
  const std::vector<std::string>& transcript() const { return transcript_; }
  const UplinkConfig& config() const { return config_; }

 private:
  void send(const UplinkEnvelope& envelope, Millis now, std::string_view outcome);
  void log(const UplinkEnvelope& envelope, std::optional<Millis> sent_at, std::string_view outcome);

  UplinkConfig config_;
  Millis started_at_;
  std::uint64_t next_sequence_ = 1;
  bool link_up_ = true;
  OfflineBuffer buffer_;
  std::vector<Delivery> delivered_;
  std::vector<std::string> transcript_;
};

}  // namespace eldercare
