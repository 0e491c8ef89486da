#include "eldercare/window_manager.hpp"

#include <algorithm>
#include <stdexcept>

namespace eldercare {

void WindowConfig::validate() const {
  if (window_ms <= 0) throw std::invalid_argument("window size must be positive");
  if (hop_ms <= 0) throw std::invalid_argument("hop size must be positive");
  if (tolerance_ms < 0) throw std::invalid_argument("tolerance must be non-negative");
  if (capacity_per_type == 0) throw std::invalid_argument("buffer capacity must be positive");
}

std::size_t FusionWindow::size() const {
  std::size_t n = 0;
  for (const auto& [type, list] : readings_by_type) n += list.size();
  return n;
}

WindowManager::WindowManager(WindowConfig config) : config_(config) { config_.validate(); }

IngestAck WindowManager::ingest(SensorReading reading) {
  if (auto why = validate(reading); !why.empty()) {
    ++rejected_;
    return {false, std::move(why)};
  }
  auto& list = buffer_[reading.sensor_type];
  // Readings nearly always arrive in order; upper_bound keeps equal
  // timestamps in arrival order.
  auto pos = std::upper_bound(list.begin(), list.end(), reading.timestamp,
                              [](Millis t, const SensorReading& r) { return t < r.timestamp; });
  list.insert(pos, std::move(reading));
  if (list.size() > config_.capacity_per_type) {
    list.pop_front();
    ++evicted_;
  }
  return {true, {}};
}

std::optional<FusionWindow> WindowManager::advance(Millis now) {
  if (last_advance_ && now < *last_advance_) {
    throw std::invalid_argument("advance time moved backwards");
  }
  last_advance_ = now;
  if (last_end_ && now - *last_end_ < config_.hop_ms) return std::nullopt;

  FusionWindow window;
  window.window_end = now;
  window.window_start = now - config_.window_ms;
  const Millis lo = window.window_start - config_.tolerance_ms;
  const Millis hi = window.window_end + config_.tolerance_ms;

  for (auto& [type, list] : buffer_) {
    while (!list.empty() && list.front().timestamp < lo) list.pop_front();
    std::vector<SensorReading> members;
    for (const auto& r : list) {
      if (r.timestamp > hi) break;
      members.push_back(r);
    }
    if (!members.empty()) window.readings_by_type.emplace(type, std::move(members));
  }
  last_end_ = now;
  return window;
}

std::size_t WindowManager::buffered() const {
  std::size_t n = 0;
  for (const auto& [type, list] : buffer_) n += list.size();
  return n;
}

std::size_t WindowManager::buffered(SensorType type) const {
  auto it = buffer_.find(type);
  return it == buffer_.end() ? 0 : it->second.size();
}

}  // namespace eldercare
