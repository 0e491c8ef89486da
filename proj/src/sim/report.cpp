#include "eldercare/sim/report.hpp"

#include <cstdio>
#include <fstream>

namespace eldercare::sim {

using nlohmann::ordered_json;

namespace {

std::string line(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

unsigned long long u(std::size_t v) { return static_cast<unsigned long long>(v); }
long long ll(Millis v) { return static_cast<long long>(v); }

}  // namespace

ordered_json metrics_to_json(const RunMetrics& m) {
  ordered_json j;
  j["windows"] = m.windows;
  j["readings_ingested"] = m.readings_ingested;
  j["readings_rejected"] = m.readings_rejected;
  j["trace_rejected_lines"] = m.trace_rejected_lines;
  ordered_json stages = ordered_json::object();
  for (const auto& name : kStageNames) {
    auto it = m.stages.find(name);
    const StageSummary s = it == m.stages.end() ? StageSummary{} : it->second;
    stages[name] = {{"count", s.count}, {"p50_ms", s.p50}, {"p95_ms", s.p95}, {"max_ms", s.max}};
  }
  j["latency"] = stages;
  ordered_json alerts = ordered_json::object();
  for (const auto& [level, n] : m.alerts_by_level) alerts[level] = n;
  j["alerts"] = alerts;
  j["manual_alerts"] = m.manual_alerts;
  j["suppressed_alerts"] = m.suppressed_alerts;
  j["plan_warnings"] = m.plan_warnings;
  j["notifications"] = m.notifications;
  j["delivered"] = m.delivered;
  j["failed"] = m.failed;
  j["success_rate"] = m.success_rate;
  j["volunteer_accepts"] = m.volunteer_accepts;
  j["volunteer_declines"] = m.volunteer_declines;
  j["uplink_published"] = m.uplink_published;
  j["uplink_buffered"] = m.uplink_buffered;
  j["uplink_replayed"] = m.uplink_replayed;
  j["uplink_dropped"] = m.uplink_dropped;
  j["digest"] = m.digest;
  return j;
}

RunMetrics metrics_from_json(const nlohmann::json& j) {
  RunMetrics m;
  try {
    m.windows = j.at("windows").get<std::size_t>();
    m.readings_ingested = j.at("readings_ingested").get<std::size_t>();
    m.readings_rejected = j.at("readings_rejected").get<std::size_t>();
    m.trace_rejected_lines = j.at("trace_rejected_lines").get<std::size_t>();
    for (const auto& [name, s] : j.at("latency").items()) {
      m.stages[name] = {s.at("count").get<std::size_t>(), s.at("p50_ms").get<Millis>(),
                        s.at("p95_ms").get<Millis>(), s.at("max_ms").get<Millis>()};
    }
    for (const auto& [level, n] : j.at("alerts").items()) {
      m.alerts_by_level[level] = n.get<std::size_t>();
    }
    m.manual_alerts = j.at("manual_alerts").get<std::size_t>();
    m.suppressed_alerts = j.at("suppressed_alerts").get<std::size_t>();
    m.plan_warnings = j.at("plan_warnings").get<std::size_t>();
    m.notifications = j.at("notifications").get<std::size_t>();
    m.delivered = j.at("delivered").get<std::size_t>();
    m.failed = j.at("failed").get<std::size_t>();
    m.success_rate = j.at("success_rate").get<double>();
    m.volunteer_accepts = j.at("volunteer_accepts").get<std::size_t>();
    m.volunteer_declines = j.at("volunteer_declines").get<std::size_t>();
    m.uplink_published = j.at("uplink_published").get<std::size_t>();
    m.uplink_buffered = j.at("uplink_buffered").get<std::size_t>();
    m.uplink_replayed = j.at("uplink_replayed").get<std::size_t>();
    m.uplink_dropped = j.at("uplink_dropped").get<std::size_t>();
    m.digest = j.at("digest").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("metrics file: ") + e.what());
  }
  return m;
}

RunMetrics load_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("metrics file " + path.string() + ": " + e.what());
  }
  return metrics_from_json(j);
}

std::string render_report(const RunMetrics& m) {
  std::string out;
  out += "Latency breakdown (simulated ms)\n";
  out += line("%-12s %8s %8s %8s %8s\n", "stage", "count", "p50", "p95", "max");
  for (const auto& name : kStageNames) {
    auto it = m.stages.find(name);
    if (it == m.stages.end() || it->second.count == 0) {
      out += line("%-12s %8d %8s %8s %8s\n", name.c_str(), 0, "-", "-", "-");
    } else {
      const auto& s = it->second;
      out += line("%-12s %8llu %8lld %8lld %8lld\n", name.c_str(), u(s.count), ll(s.p50),
                  ll(s.p95), ll(s.max));
    }
  }
  out += "\nAlerts\n";
  std::size_t total = 0;
  for (const char* level : {"YELLOW", "ORANGE", "RED"}) {
    auto it = m.alerts_by_level.find(level);
    const std::size_t n = it == m.alerts_by_level.end() ? 0 : it->second;
    total += n;
    out += line("  %-10s %llu\n", level, u(n));
  }
  out += line("  %-10s %llu\n", "total", u(total));
  out += line("  %-10s %llu\n", "manual", u(m.manual_alerts));
  out += line("  %-10s %llu\n", "suppressed", u(m.suppressed_alerts));

  out += "\nDelivery\n";
  out += line("  notifications %llu\n", u(m.notifications));
  out += line("  delivered     %llu\n", u(m.delivered));
  out += line("  failed        %llu\n", u(m.failed));
  out += line("  success_rate  %.4f\n", m.success_rate);
  out += line("  volunteers    %llu accepted, %llu declined\n", u(m.volunteer_accepts),
              u(m.volunteer_declines));

  out += "\nUplink\n";
  out += line("  published     %llu\n", u(m.uplink_published));
  out += line("  buffered      %llu\n", u(m.uplink_buffered));
  out += line("  replayed      %llu\n", u(m.uplink_replayed));
  out += line("  buffer_drops  %llu\n", u(m.uplink_dropped));

  out += "\nRun\n";
  out += line("  windows       %llu\n", u(m.windows));
  out += line("  readings      %llu ingested, %llu rejected, %llu bad trace lines\n",
              u(m.readings_ingested), u(m.readings_rejected), u(m.trace_rejected_lines));
  out += "  digest        " + m.digest + "\n";
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_report(const RunMetrics& metrics, const std::filesystem::path& dir) {
  write_text_file(dir / "report.txt", render_report(metrics));
}

}  // namespace eldercare::sim
