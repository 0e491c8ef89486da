#include "eldercare/sim/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "eldercare/digest.hpp"
#include "eldercare/sim/report.hpp"
#include "eldercare/sim/rng.hpp"

namespace eldercare::sim {

using nlohmann::ordered_json;

StageSummary summarize(std::vector<Millis> samples) {
  StageSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  auto rank = [&](double p) {
    auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(samples.size())));
    return samples[std::max<std::size_t>(idx, 1) - 1];
  };
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  s.max = samples.back();
  return s;
}

namespace {

// Lower value runs first among events at the same instant.
enum class EventKind : int {
  ManualTrigger = 0,
  Link = 1,
  Receipt = 2,
  Decision = 3,
  WindowTick = 4,
  Heartbeat = 5,
};

struct Event {
  Millis at = 0;
  EventKind kind = EventKind::WindowTick;
  std::uint64_t seq = 0;
  std::size_t index = 0;  // into the kind-specific payload table

  bool operator>(const Event& o) const {
    if (at != o.at) return at > o.at;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

struct PendingReceipt {
  std::string record_id;
  Receipt receipt;
  bool volunteer = false;
  std::string alert_id;
  std::string recipient;
};

struct PendingDecision {
  FusionResult fusion;
  RiskAssessment assessment;
};

struct LinkChange {
  bool down = false;
};

class ClosedSet : public ChannelHandle {
 public:
  explicit ClosedSet(const std::vector<Channel>& closed) : closed_(closed) {}
  bool is_open(Channel c) const override {
    return std::find(closed_.begin(), closed_.end(), c) == closed_.end();
  }

 private:
  std::vector<Channel> closed_;
};

ordered_json fusion_json(const FusionResult& f) {
  ordered_json j;
  j["window_end"] = f.window_end;
  j["activity"] = std::string(to_string(f.activity));
  j["posture"] = std::string(to_string(f.posture));
  j["heart_rate"] = f.heart_rate ? ordered_json(*f.heart_rate) : ordered_json(nullptr);
  j["spo2"] = f.spo2 ? ordered_json(*f.spo2) : ordered_json(nullptr);
  j["motion_intensity"] = f.motion_intensity;
  j["raw_intensity"] = f.raw_intensity;
  j["location"] = f.location;
  j["anomaly_score"] = f.anomaly_score;
  auto flags = ordered_json::array();
  for (auto fl : f.anomaly_flags) flags.push_back(std::string(to_string(fl)));
  j["anomaly_flags"] = flags;
  j["confidence"] = f.confidence;
  return j;
}

template <typename Flags>
ordered_json flag_names(const Flags& flags) {
  auto arr = ordered_json::array();
  for (auto f : flags) arr.push_back(std::string(to_string(f)));
  return arr;
}

class Simulation {
 public:
  Simulation(const SimConfig& config, const Trace& trace)
      : cfg_(config),
        trace_(trace),
        rng_(config.seed),
        windows_(config.window),
        desk_(config.elder_id, config.dedup_window_ms),
        uplink_(config.uplink, 0),
        channels_(config.closed_channels) {}

  RunOutput execute() {
    const auto host_start = std::chrono::steady_clock::now();
    schedule_static_events();
    Millis last = std::numeric_limits<Millis>::min();
    while (!queue_.empty()) {
      const Event e = queue_.top();
      queue_.pop();
      if (e.at < last) throw std::logic_error("event queue went back in time");
      last = e.at;
      out_.event_times.push_back(e.at);
      switch (e.kind) {
        case EventKind::ManualTrigger: on_manual(e.at); break;
        case EventKind::Link: on_link(e.at, links_[e.index]); break;
        case EventKind::Receipt: on_receipt(e.at, receipts_[e.index]); break;
        case EventKind::Decision: on_decision(e.at, decisions_[e.index]); break;
        case EventKind::WindowTick: on_tick(e.at); break;
        case EventKind::Heartbeat: publish(uplink_.heartbeat(e.at), e.at); break;
      }
    }
    finish();
    out_.host_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             host_start)
                       .count();
    return std::move(out_);
  }

 private:
  void push(Millis at, EventKind kind, std::size_t index = 0) {
    queue_.push({at, kind, next_seq_++, index});
  }

  void schedule_static_events() {
    const Millis hop = cfg_.window.hop_ms;
    const Millis last_ts = trace_.readings.empty() ? 0 : trace_.readings.back().timestamp;
    last_tick_ = std::max<Millis>(hop, (last_ts + hop - 1) / hop * hop);
    for (Millis t = hop; t <= last_tick_; t += hop) push(t, EventKind::WindowTick);
    for (Millis t = cfg_.heartbeat_interval_ms; t <= last_tick_; t += cfg_.heartbeat_interval_ms) {
      push(t, EventKind::Heartbeat);
    }
    std::vector<Outage> outages = cfg_.outages;
    outages.insert(outages.end(), trace_.outages.begin(), trace_.outages.end());
    for (const auto& o : outages) {
      links_.push_back({true});
      push(o.start_ms, EventKind::Link, links_.size() - 1);
      links_.push_back({false});
      push(o.end_ms, EventKind::Link, links_.size() - 1);
    }
    for (auto t : cfg_.manual_triggers_ms) push(t, EventKind::ManualTrigger);
  }

  void on_tick(Millis now) {
    const Millis horizon = now + cfg_.window.tolerance_ms;
    while (next_reading_ < trace_.readings.size() &&
           trace_.readings[next_reading_].timestamp <= horizon) {
      if (windows_.ingest(trace_.readings[next_reading_])) ++out_.metrics.readings_ingested;
      ++next_reading_;
    }
    auto window = windows_.advance(now);
    if (!window) return;
    ++out_.metrics.windows;

    auto fusion = fuse_window(*window, cfg_.fusion, vitals_);
    vitals_.record(fusion);
    history_.push(fusion);
    const Millis tod = (cfg_.clock_anchor_ms + now) % (24 * 3600'000);
    const auto bundle = infer(history_, tod, cfg_.quiet_hours);
    auto assessment = assess(bundle, fusion, history_, risk_history_, cfg_.risk);

    stage_ble_.push_back(cfg_.stages.ble);
    stage_fusion_.push_back(cfg_.stages.fusion);
    stage_inference_.push_back(cfg_.inference_latency());
    stage_risk_.push_back(cfg_.stages.risk);

    auto j = fusion_json(fusion);
    j["fall_probability"] = bundle.fall_probability;
    j["fall_indicators"] = flag_names(bundle.fall_indicators);
    j["sequence_confirmed"] = bundle.sequence_confirmed;
    j["health_risk"] = bundle.health_risk;
    j["health_flags"] = flag_names(bundle.health_flags);
    j["behavior_flags"] = flag_names(bundle.behavior_flags);
    j["risk_base"] = assessment.base_score;
    j["risk"] = assessment.adjusted_score;
    j["trend"] = std::string(to_string(assessment.trend));
    j["level"] = std::string(to_string(assessment.level));
    out_.fusion_log.push_back(j.dump());

    const Millis decision_at =
        now + cfg_.stages.ble + cfg_.stages.fusion + cfg_.inference_latency() + cfg_.stages.risk;
    decisions_.push_back({std::move(fusion), std::move(assessment)});
    push(decision_at, EventKind::Decision, decisions_.size() - 1);
  }

  void on_decision(Millis at, PendingDecision& d) {
    // Summary only; raw IMU never leaves the gateway.
    publish(uplink_.make_envelope(Topic::Data, fusion_json(d.fusion).dump(), at), at);
    auto alert = desk_.raise(d.assessment, d.fusion.location, at);
    if (desk_.suppressed_count() != suppressed_seen_) {
      suppressed_seen_ = desk_.suppressed_count();
      ordered_json j;
      j["event"] = "suppressed";
      j["at"] = at;
      j["level"] = std::string(to_string(d.assessment.level));
      out_.alert_log.push_back(j.dump());
    }
    if (!alert) return;
    AlertTiming timing;
    timing.ble = cfg_.stages.ble;
    timing.fusion = cfg_.stages.fusion;
    timing.inference = cfg_.inference_latency();
    timing.risk = cfg_.stages.risk;
    raise_alert(*alert, timing, &d.assessment);
    d = {};  // release the payload
  }

  void on_manual(Millis at) {
    const Millis received = at + cfg_.stages.ble;
    auto alert = desk_.manual_trigger(received);
    AlertTiming timing;
    timing.ble = cfg_.stages.ble;
    raise_alert(alert, timing, nullptr);
  }

  void raise_alert(const Alert& alert, AlertTiming timing, const RiskAssessment* assessment) {
    timing.alert_id = alert.alert_id;
    timing.level = alert.level;
    timing.source = alert.source;
    timing.created_at = alert.created_at;
    timing.dispatch = cfg_.stages.dispatch;

    ++out_.metrics.alerts_by_level[std::string(to_string(alert.level))];
    if (alert.source == AlertSource::Manual) ++out_.metrics.manual_alerts;

    const Millis sent_at = alert.created_at + cfg_.stages.dispatch;
    const auto plan = plan_notifications(alert, cfg_.contacts, cfg_.elder_location,
                                         cfg_.volunteer_radius_m);
    out_.metrics.plan_warnings += plan.warnings.size();
    const auto records = dispatch(alert, plan, channels_, sent_at);
    Millis slowest = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      store_.add(r);
      ++out_.metrics.notifications;
      if (r.status == DeliveryStatus::Failed) continue;
      const auto outcome = simulate_channel(r.channel, cfg_.channels, rng_);
      if (r.channel != Channel::Call) slowest = std::max(slowest, outcome.latency_ms);
      PendingReceipt p;
      p.record_id = r.record_id;
      p.receipt.at = sent_at + outcome.latency_ms;
      if (r.channel == Channel::Call) {
        p.receipt.status = outcome.delivered ? DeliveryStatus::Answered : DeliveryStatus::Failed;
      } else {
        p.receipt.status = outcome.delivered ? DeliveryStatus::Delivered : DeliveryStatus::Failed;
      }
      p.volunteer = plan.entries[i].role == ContactRole::Volunteer;
      p.alert_id = alert.alert_id;
      p.recipient = r.recipient;
      receipts_.push_back(std::move(p));
      push(receipts_.back().receipt.at, EventKind::Receipt, receipts_.size() - 1);
    }
    timing.channel = slowest;
    timing.end_to_end = timing.ble + timing.fusion + timing.inference + timing.risk +
                        timing.dispatch + timing.channel;
    out_.alert_timings.push_back(timing);

    ordered_json j;
    j["event"] = "alert";
    j["alert_id"] = alert.alert_id;
    j["elder_id"] = alert.elder_id;
    j["created_at"] = alert.created_at;
    j["level"] = std::string(to_string(alert.level));
    j["source"] = std::string(to_string(alert.source));
    j["location"] = alert.location;
    if (assessment) {
      j["risk_base"] = assessment->base_score;
      j["risk"] = assessment->adjusted_score;
      j["trend"] = std::string(to_string(assessment->trend));
      j["escalated"] = assessment->escalated;
    }
    j["latency_ms"] = {{"ble", timing.ble},           {"fusion", timing.fusion},
                       {"inference", timing.inference}, {"risk", timing.risk},
                       {"dispatch", timing.dispatch}, {"channel", timing.channel},
                       {"end_to_end", timing.end_to_end}};
    j["recipients"] = plan.entries.size();
    j["warnings"] = plan.warnings;
    j["risk_detail"] = alert.risk_detail.sections;
    out_.alert_log.push_back(j.dump());

    publish(uplink_.make_envelope(Topic::Alert, notification_content(alert), alert.created_at),
            alert.created_at);
  }

  void on_receipt(Millis at, const PendingReceipt& p) {
    const auto rec = store_.apply(p.record_id, p.receipt);
    const bool ok = rec.status == DeliveryStatus::Delivered || rec.status == DeliveryStatus::Answered;
    ++(ok ? out_.metrics.delivered : out_.metrics.failed);
    if (p.volunteer && ok) {
      const bool accepted = rng_.bernoulli(cfg_.volunteer_accept_probability);
      ++(accepted ? out_.metrics.volunteer_accepts : out_.metrics.volunteer_declines);
      ordered_json j;
      j["event"] = "volunteer_response";
      j["at"] = at;
      j["alert_id"] = p.alert_id;
      j["volunteer"] = p.recipient;
      j["accepted"] = accepted;
      out_.alert_log.push_back(j.dump());
    }
  }

  void on_link(Millis at, const LinkChange& change) {
    outage_depth_ += change.down ? 1 : -1;
    const bool up = outage_depth_ == 0;
    if (up == uplink_.link_up()) return;
    const auto replayed = uplink_.set_link(up, at);
    out_.metrics.uplink_replayed += replayed.size();
  }

  void publish(UplinkEnvelope envelope, Millis at) {
    ++out_.metrics.uplink_published;
    if (uplink_.publish(std::move(envelope), at) == PublishOutcome::Buffered) {
      ++out_.metrics.uplink_buffered;
    }
  }

  void finish() {
    auto& m = out_.metrics;
    m.readings_rejected = windows_.rejected_count();
    m.trace_rejected_lines = trace_.rejected_lines;
    m.suppressed_alerts = desk_.suppressed_count();
    m.uplink_dropped = uplink_.drop_count();
    const auto decided = m.delivered + m.failed;
    m.success_rate = decided == 0 ? 0.0 : static_cast<double>(m.delivered) / static_cast<double>(decided);

    std::vector<Millis> dispatch_s, channel_s, e2e_s;
    for (const auto& t : out_.alert_timings) {
      dispatch_s.push_back(t.dispatch);
      channel_s.push_back(t.channel);
      e2e_s.push_back(t.end_to_end);
    }
    m.stages["ble"] = summarize(std::move(stage_ble_));
    m.stages["fusion"] = summarize(std::move(stage_fusion_));
    m.stages["inference"] = summarize(std::move(stage_inference_));
    m.stages["risk"] = summarize(std::move(stage_risk_));
    m.stages["dispatch"] = summarize(std::move(dispatch_s));
    m.stages["channel"] = summarize(std::move(channel_s));
    m.stages["end_to_end"] = summarize(std::move(e2e_s));
    for (auto level : {AlertLevel::Yellow, AlertLevel::Orange, AlertLevel::Red}) {
      m.alerts_by_level.try_emplace(std::string(to_string(level)), 0);
    }

    out_.notification_log = store_.audit_log();
    out_.uplink_log = uplink_.transcript();
    for (const auto& d : uplink_.delivered()) out_.cloud_sequences.push_back(d.envelope.sequence);

    Fnv1a h;
    for (const auto* log : {&out_.fusion_log, &out_.alert_log, &out_.notification_log,
                            &out_.uplink_log}) {
      for (const auto& line : *log) {
        h.update(line);
        h.update("\n");
      }
      h.update("\x1e");
    }
    m.digest = h.hex();
  }

  const SimConfig& cfg_;
  const Trace& trace_;
  SimRng rng_;
  WindowManager windows_;
  VitalsHistory vitals_;
  FusionHistory history_;
  RiskHistory risk_history_;
  AlertDesk desk_;
  NotificationStore store_;
  UplinkClient uplink_;
  ClosedSet channels_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_seq_ = 0;
  std::vector<PendingReceipt> receipts_;
  std::vector<PendingDecision> decisions_;
  std::vector<LinkChange> links_;
  std::size_t next_reading_ = 0;
  Millis last_tick_ = 0;
  int outage_depth_ = 0;
  std::size_t suppressed_seen_ = 0;

  std::vector<Millis> stage_ble_, stage_fusion_, stage_inference_, stage_risk_;
  RunOutput out_;
};

}  // namespace

RunOutput run(const SimConfig& config, const Trace& trace) {
  config.validate();
  Simulation sim(config, trace);
  return sim.execute();
}

void write_outputs(const RunOutput& output, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write_lines = [&](const char* name, const std::vector<std::string>& lines) {
    std::string body;
    for (const auto& l : lines) {
      body += l;
      body += '\n';
    }
    write_text_file(out_dir / name, body);
  };
  write_lines("fusion.ndjson", output.fusion_log);
  write_lines("alerts.ndjson", output.alert_log);
  write_lines("notifications.ndjson", output.notification_log);
  write_lines("uplink.ndjson", output.uplink_log);
  write_text_file(out_dir / "metrics.json", metrics_to_json(output.metrics).dump(2) + "\n");
  write_report(output.metrics, out_dir);
  char buf[64];
  std::snprintf(buf, sizeof buf, "host_ms %.3f\n", output.host_ms);
  write_text_file(out_dir / "host_timing.txt", buf);
}

}  // namespace eldercare::sim
