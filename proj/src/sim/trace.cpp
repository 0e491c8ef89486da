#include "eldercare/sim/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace eldercare::sim {

TraceParseError::TraceParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues parse_pairs(std::string_view payload, std::size_t line) {
  KeyValues kv;
  if (trim(payload).empty()) throw TraceParseError(line, "empty payload");
  for (auto item : split(payload, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw TraceParseError(line, "payload item '" + std::string(item) + "' is not key=value");
    }
    auto [it, fresh] = kv.emplace(std::string(trim(item.substr(0, eq))),
                                  std::string(trim(item.substr(eq + 1))));
    if (!fresh) throw TraceParseError(line, "duplicate payload key '" + it->first + "'");
  }
  return kv;
}

double number(const KeyValues& kv, std::string_view key, std::size_t line) {
  auto it = kv.find(key);
  if (it == kv.end()) throw TraceParseError(line, "missing payload key '" + std::string(key) + "'");
  double v = 0.0;
  if (!parse_number(it->second, v)) {
    throw TraceParseError(line, "payload key '" + std::string(key) + "' is not a number");
  }
  return v;
}

bool flag(const KeyValues& kv, std::string_view key, std::size_t line) {
  auto it = kv.find(key);
  if (it == kv.end()) throw TraceParseError(line, "missing payload key '" + std::string(key) + "'");
  if (it->second == "1") return true;
  if (it->second == "0") return false;
  throw TraceParseError(line, "payload key '" + std::string(key) + "' must be 0 or 1");
}

void only_keys(const KeyValues& kv, std::initializer_list<std::string_view> allowed,
               std::size_t line) {
  for (const auto& [k, v] : kv) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw TraceParseError(line, "unexpected payload key '" + k + "'");
    }
  }
}

Payload parse_payload(SensorType type, std::string_view text, std::size_t line) {
  const auto kv = parse_pairs(text, line);
  const bool imu_keys = kv.contains("ax") || kv.contains("ay") || kv.contains("az");
  switch (type) {
    case SensorType::Wristband:
    case SensorType::Motion:
      if (imu_keys || type == SensorType::Motion) {
        only_keys(kv, {"ax", "ay", "az", "gx", "gy", "gz"}, line);
        ImuPayload p;
        p.accel = {number(kv, "ax", line), number(kv, "ay", line), number(kv, "az", line)};
        if (kv.contains("gx")) p.gyro.x = number(kv, "gx", line);
        if (kv.contains("gy")) p.gyro.y = number(kv, "gy", line);
        if (kv.contains("gz")) p.gyro.z = number(kv, "gz", line);
        return p;
      } else {
        only_keys(kv, {"hr", "spo2"}, line);
        VitalsPayload p;
        if (kv.contains("hr")) p.heart_rate = number(kv, "hr", line);
        if (kv.contains("spo2")) p.spo2 = number(kv, "spo2", line);
        return p;
      }
    case SensorType::Camera: {
      only_keys(kv, {"posture", "conf"}, line);
      auto it = kv.find("posture");
      if (it == kv.end()) throw TraceParseError(line, "missing payload key 'posture'");
      auto posture = parse_posture(it->second);
      if (!posture) throw TraceParseError(line, "unknown posture '" + it->second + "'");
      PostureEstimatePayload p;
      p.posture = *posture;
      p.confidence = kv.contains("conf") ? number(kv, "conf", line) : 1.0;
      return p;
    }
    case SensorType::Door:
      only_keys(kv, {"opened"}, line);
      return DoorEventPayload{flag(kv, "opened", line)};
    case SensorType::Bed:
      only_keys(kv, {"present"}, line);
      return BedPresencePayload{flag(kv, "present", line)};
  }
  throw TraceParseError(line, "unsupported sensor type");
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

Trace parse_trace(std::istream& in) {
  Trace trace;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with("#!outage")) {
        std::istringstream ss{std::string(line.substr(8))};
        Outage o;
        if (!(ss >> o.start_ms >> o.end_ms) || o.start_ms < 0 || o.end_ms <= o.start_ms) {
          throw TraceParseError(line_no, "outage directive needs START END with START < END");
        }
        trace.outages.push_back(o);
      }
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 4) {
      throw TraceParseError(line_no, "expected 4 columns (t_ms,sensor_id,sensor_type,payload), got " +
                                         std::to_string(cols.size()));
    }
    SensorReading r;
    if (!parse_number(trim(cols[0]), r.timestamp) || r.timestamp < 0) {
      throw TraceParseError(line_no, "timestamp must be a non-negative integer");
    }
    r.sensor_id = std::string(trim(cols[1]));
    if (r.sensor_id.empty()) throw TraceParseError(line_no, "empty sensor id");
    auto type = parse_sensor_type(trim(cols[2]));
    if (!type) {
      ++trace.rejected_lines;
      continue;
    }
    r.sensor_type = *type;
    r.payload = parse_payload(*type, cols[3], line_no);
    trace.readings.push_back(std::move(r));
  }
  std::stable_sort(trace.readings.begin(), trace.readings.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  return trace;
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path.string());
  return parse_trace(in);
}

std::string format_reading(const SensorReading& r) {
  std::string out = std::to_string(r.timestamp);
  out += ',';
  out += r.sensor_id;
  out += ',';
  out += to_string(r.sensor_type);
  out += ',';
  auto kv = [&out](std::string_view key, double v, bool first = false) {
    if (!first) out += ';';
    out += key;
    out += '=';
    append_number(out, v);
  };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ImuPayload>) {
          kv("ax", p.accel.x, true);
          kv("ay", p.accel.y);
          kv("az", p.accel.z);
          kv("gx", p.gyro.x);
          kv("gy", p.gyro.y);
          kv("gz", p.gyro.z);
        } else if constexpr (std::is_same_v<T, VitalsPayload>) {
          bool first = true;
          if (p.heart_rate) {
            kv("hr", *p.heart_rate, true);
            first = false;
          }
          if (p.spo2) kv("spo2", *p.spo2, first);
        } else if constexpr (std::is_same_v<T, PostureEstimatePayload>) {
          out += "posture=";
          out += to_string(p.posture);
          kv("conf", p.confidence);
        } else if constexpr (std::is_same_v<T, DoorEventPayload>) {
          out += p.opened ? "opened=1" : "opened=0";
        } else {
          out += p.present ? "present=1" : "present=0";
        }
      },
      r.payload);
  return out;
}

void write_trace(std::ostream& out, const Trace& trace, const std::string& header) {
  if (!header.empty()) out << "# " << header << '\n';
  out << "# t_ms,sensor_id,sensor_type,payload\n";
  for (const auto& o : trace.outages) out << "#!outage " << o.start_ms << ' ' << o.end_ms << '\n';
  for (const auto& r : trace.readings) out << format_reading(r) << '\n';
}

}  // namespace eldercare::sim
