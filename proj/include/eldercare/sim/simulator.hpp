#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "eldercare/sim/config.hpp"
#include "eldercare/sim/trace.hpp"

namespace eldercare::sim {

struct StageSummary {
  std::size_t count = 0;
  Millis p50 = 0;
  Millis p95 = 0;
  Millis max = 0;

  friend bool operator==(const StageSummary&, const StageSummary&) = default;
};

/// Nearest-rank percentiles over the samples.
StageSummary summarize(std::vector<Millis> samples);

/// Row order of the latency table.
inline const std::vector<std::string> kStageNames = {
    "ble", "fusion", "inference", "risk", "dispatch", "channel", "end_to_end"};

/// Per-alert latency decomposition; end_to_end is the sum of the stages.
struct AlertTiming {
  std::string alert_id;
  AlertLevel level = AlertLevel::Yellow;
  AlertSource source = AlertSource::Automatic;
  Millis created_at = 0;
  Millis ble = 0;
  Millis fusion = 0;
  Millis inference = 0;
  Millis risk = 0;
  Millis dispatch = 0;
  Millis channel = 0;  // slowest sms/push delivery attempt
  Millis end_to_end = 0;
};

struct RunMetrics {
  std::size_t windows = 0;
  std::size_t readings_ingested = 0;
  std::size_t readings_rejected = 0;
  std::size_t trace_rejected_lines = 0;

  std::map<std::string, StageSummary> stages;
  std::map<std::string, std::size_t> alerts_by_level;  // YELLOW / ORANGE / RED
  std::size_t manual_alerts = 0;
  std::size_t suppressed_alerts = 0;
  std::size_t plan_warnings = 0;

  std::size_t notifications = 0;
  std::size_t delivered = 0;  // delivered (sms/push) or answered (call)
  std::size_t failed = 0;
  double success_rate = 0.0;  // delivered / (delivered + failed)
  std::size_t volunteer_accepts = 0;
  std::size_t volunteer_declines = 0;

  std::size_t uplink_published = 0;
  std::size_t uplink_buffered = 0;
  std::size_t uplink_replayed = 0;
  std::size_t uplink_dropped = 0;

  std::string digest;  // over every output log, in order
};

struct RunOutput {
  RunMetrics metrics;
  std::vector<AlertTiming> alert_timings;
  std::vector<std::string> fusion_log;
  std::vector<std::string> alert_log;
  std::vector<std::string> notification_log;
  std::vector<std::string> uplink_log;
  std::vector<std::uint64_t> cloud_sequences;  // in arrival order at the cloud
  std::vector<Millis> event_times;             // processing order, for auditing
  double host_ms = 0.0;                        // wall-clock, not part of the digest
};

/// Replays the trace through the whole pipeline on a single-threaded event
/// queue. The output is a pure function of (config, trace).
RunOutput run(const SimConfig& config, const Trace& trace);

/// Writes fusion/alerts/notifications/uplink .ndjson, metrics.json and
/// report.txt, plus host_timing.txt (the only non-deterministic file).
void write_outputs(const RunOutput& output, const std::filesystem::path& out_dir);

}  // namespace eldercare::sim
