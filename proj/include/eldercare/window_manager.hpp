#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eldercare/types.hpp"

namespace eldercare {

struct WindowConfig {
  Millis window_ms = 3000;
  Millis hop_ms = 1000;
  Millis tolerance_ms = 100;
  std::size_t capacity_per_type = 10000;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct FusionWindow {
  Millis window_start = 0;
  Millis window_end = 0;
  std::map<SensorType, std::vector<SensorReading>> readings_by_type;

  bool empty() const { return readings_by_type.empty(); }
  std::size_t size() const;
};

struct IngestAck {
  bool accepted = false;
  std::string reason;  // set when rejected

  explicit operator bool() const { return accepted; }
};

/// Buffers readings per sensor type and cuts them into overlapping,
/// time-aligned windows. Owned by a single pipeline.
class WindowManager {
 public:
  explicit WindowManager(WindowConfig config = {});

  /// Malformed readings are rejected and counted, never thrown.
  IngestAck ingest(SensorReading reading);

  /// Emits the window [now - window_ms, now] once a full hop has passed since
  /// the previous one (the first call always emits). Readings that fall before
  /// the padded window start are dropped from the buffer.
  std::optional<FusionWindow> advance(Millis now);

  std::size_t buffered() const;
  std::size_t buffered(SensorType type) const;
  std::size_t rejected_count() const { return rejected_; }
  std::size_t evicted_count() const { return evicted_; }
  std::optional<Millis> last_window_end() const { return last_end_; }
  const WindowConfig& config() const { return config_; }

 private:
  WindowConfig config_;
  std::map<SensorType, std::deque<SensorReading>> buffer_;
  std::optional<Millis> last_end_;
  std::optional<Millis> last_advance_;
  std::size_t rejected_ = 0;
  std::size_t evicted_ = 0;
};

}  // namespace eldercare
