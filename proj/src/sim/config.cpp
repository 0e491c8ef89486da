#include "eldercare/sim/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace eldercare::sim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) fail(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    fail(where + "." + key + ": " + e.what());
  }
}

SensorType sensor_type_of(const std::string& name, const std::string& where) {
  auto t = parse_sensor_type(name);
  if (!t) fail(where + ": unknown sensor type '" + name + "'");
  return *t;
}

Channel channel_of(const std::string& name, const std::string& where) {
  for (auto c : {Channel::Sms, Channel::Push, Channel::Call}) {
    if (to_string(c) == name) return c;
  }
  fail(where + ": unknown channel '" + name + "'");
}

Point point_of(const json& j, const std::string& where) {
  check_keys(j, where, {"x", "y"});
  Point p;
  read(j, "x", p.x, where);
  read(j, "y", p.y, where);
  return p;
}

Contact contact_of(const json& j, const std::string& where) {
  check_keys(j, where, {"id", "role", "phone", "has_app", "location", "available"});
  Contact c;
  read(j, "id", c.contact_id, where);
  std::string role = "family";
  read(j, "role", role, where);
  auto r = parse_role(role);
  if (!r) fail(where + ": unknown role '" + role + "'");
  c.role = *r;
  read(j, "phone", c.phone, where);
  read(j, "has_app", c.has_app, where);
  read(j, "available", c.available, where);
  if (j.contains("location")) c.location = point_of(j["location"], where + ".location");
  return c;
}

ordered_json point_json(const Point& p) { return {{"x", p.x}, {"y", p.y}}; }

}  // namespace

Millis parse_clock(const std::string& hhmm) {
  int h = -1;
  int m = -1;
  char tail = 0;
  if (std::sscanf(hhmm.c_str(), "%d:%d%c", &h, &m, &tail) != 2 || h < 0 || h > 23 || m < 0 ||
      m > 59) {
    throw ConfigError("invalid clock value '" + hhmm + "', expected HH:MM");
  }
  return (static_cast<Millis>(h) * 60 + m) * 60'000;
}

std::string format_clock(Millis ms_of_day) {
  char buf[8];
  const auto minutes = ms_of_day / 60'000;
  std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(minutes / 60 % 24),
                static_cast<int>(minutes % 60));
  return buf;
}

void SimConfig::validate() const {
  try {
    window.validate();
    risk.weights.validate();
    risk.thresholds.validate();
    channels.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  for (const auto& [type, w] : fusion.weights.weights()) {
    if (!(w > 0.0 && w <= 1.0)) fail("sensor_weights." + std::string(to_string(type)) + " out of (0, 1]");
  }
  if (elder_id.empty()) fail("elder_id must be non-empty");
  if (clock_anchor_ms < 0 || clock_anchor_ms >= 24 * 3600'000) fail("clock_anchor out of range");
  if (!(volunteer_radius_m > 0.0)) fail("volunteer_radius_m must be positive");
  if (!(volunteer_accept_probability >= 0.0 && volunteer_accept_probability <= 1.0)) {
    fail("volunteer_accept_probability must be in [0, 1]");
  }
  if (dedup_window_ms < 0) fail("dedup_window_ms must be non-negative");
  for (auto v : {stages.ble, stages.fusion, stages.inference_rule, stages.inference_dl, stages.risk,
                 stages.dispatch}) {
    if (v < 0) fail("stage latencies must be non-negative");
  }
  if (uplink.gateway_id.empty() || uplink.gateway_id.find('/') != std::string::npos) {
    fail("uplink.gateway_id must be non-empty and contain no '/'");
  }
  if (uplink.transit_ms < 0) fail("uplink.transit_ms must be non-negative");
  if (uplink.buffer_capacity == 0) fail("uplink.buffer_capacity must be positive");
  if (heartbeat_interval_ms <= 0) fail("uplink.heartbeat_interval_ms must be positive");
  for (const auto& o : outages) {
    if (o.start_ms < 0 || o.end_ms <= o.start_ms) fail("outage intervals need 0 <= start < end");
  }
  std::set<std::string> ids;
  for (const auto& c : contacts) {
    if (c.contact_id.empty()) fail("contact id must be non-empty");
    if (!ids.insert(c.contact_id).second) fail("duplicate contact id '" + c.contact_id + "'");
    if (c.role == ContactRole::Volunteer && !c.location) {
      fail("volunteer '" + c.contact_id + "' needs a location");
    }
  }
  for (auto t : manual_triggers_ms) {
    if (t < 0) fail("manual trigger times must be non-negative");
  }
}

SimConfig default_config() {
  SimConfig c;
  c.fusion.sensor_rooms = {{"motion-living", "living_room"},
                           {"motion-bedroom", "bedroom"},
                           {"motion-kitchen", "kitchen"},
                           {"door-front", "entrance"}};
  c.contacts = {
      {"family-1", ContactRole::Family, "+10000000001", true, std::nullopt, true},
      {"family-2", ContactRole::Family, "+10000000002", false, std::nullopt, true},
      {"doctor-1", ContactRole::Doctor, "+10000000003", true, std::nullopt, true},
      {"volunteer-1", ContactRole::Volunteer, "+10000000004", true, Point{120.0, 0.0}, true},
      {"volunteer-2", ContactRole::Volunteer, "+10000000005", true, Point{300.0, 400.0}, true},
      {"volunteer-3", ContactRole::Volunteer, "+10000000006", true, Point{2000.0, 0.0}, true},
  };
  return c;
}

SimConfig config_from_json(const json& j) {
  SimConfig c = default_config();
  check_keys(j, "config",
             {"seed", "elder_id", "clock_anchor", "window", "sensor_weights", "sensor_rooms",
              "anomaly", "risk_weights", "adjustments", "alert_thresholds", "post_fall",
              "quiet_hours", "elder_location", "volunteer_radius_m",
              "volunteer_accept_probability", "dedup_window_ms", "contacts", "channels",
              "closed_channels", "stage_latency_ms", "inference_mode", "uplink",
              "manual_triggers_ms"});
  const std::string root = "config";
  read(j, "seed", c.seed, root);
  read(j, "elder_id", c.elder_id, root);
  if (j.contains("clock_anchor")) c.clock_anchor_ms = parse_clock(j["clock_anchor"].get<std::string>());

  if (j.contains("window")) {
    const auto& w = j["window"];
    check_keys(w, "window", {"size_ms", "hop_ms", "tolerance_ms", "capacity_per_type"});
    read(w, "size_ms", c.window.window_ms, "window");
    read(w, "hop_ms", c.window.hop_ms, "window");
    read(w, "tolerance_ms", c.window.tolerance_ms, "window");
    read(w, "capacity_per_type", c.window.capacity_per_type, "window");
  }
  if (j.contains("sensor_weights")) {
    const auto& w = j["sensor_weights"];
    if (!w.is_object()) fail("sensor_weights: expected an object");
    for (const auto& [name, value] : w.items()) {
      if (!value.is_number()) fail("sensor_weights." + name + ": expected a number");
      try {
        c.fusion.weights.set(sensor_type_of(name, "sensor_weights"), value.get<double>());
      } catch (const std::invalid_argument& e) {
        fail("sensor_weights." + name + ": " + e.what());
      }
    }
  }
  if (j.contains("sensor_rooms")) {
    read(j, "sensor_rooms", c.fusion.sensor_rooms, root);
  }
  if (j.contains("anomaly")) {
    const auto& a = j["anomaly"];
    auto& k = c.fusion.anomaly;
    check_keys(a, "anomaly",
               {"hr_low", "hr_high", "hr_stddev", "spo2_low", "spo2_drop", "motion_raw_limit",
                "active_mean", "still_after_active", "hr_contribution", "spo2_contribution",
                "motion_contribution"});
    read(a, "hr_low", k.hr_low, "anomaly");
    read(a, "hr_high", k.hr_high, "anomaly");
    read(a, "hr_stddev", k.hr_stddev, "anomaly");
    read(a, "spo2_low", k.spo2_low, "anomaly");
    read(a, "spo2_drop", k.spo2_drop, "anomaly");
    read(a, "motion_raw_limit", k.motion_raw_limit, "anomaly");
    read(a, "active_mean", k.active_mean, "anomaly");
    read(a, "still_after_active", k.still_after_active, "anomaly");
    read(a, "hr_contribution", k.hr_contribution, "anomaly");
    read(a, "spo2_contribution", k.spo2_contribution, "anomaly");
    read(a, "motion_contribution", k.motion_contribution, "anomaly");
  }
  if (j.contains("risk_weights")) {
    const auto& w = j["risk_weights"];
    check_keys(w, "risk_weights", {"fall", "health", "behavior", "anomaly"});
    read(w, "fall", c.risk.weights.fall, "risk_weights");
    read(w, "health", c.risk.weights.health, "risk_weights");
    read(w, "behavior", c.risk.weights.behavior, "risk_weights");
    read(w, "anomaly", c.risk.weights.anomaly, "risk_weights");
  }
  if (j.contains("adjustments")) {
    const auto& a = j["adjustments"];
    auto& k = c.risk.adjustments;
    check_keys(a, "adjustments",
               {"fall_trigger", "fall_boost", "hr_boost", "spo2_boost", "behavior_boost",
                "anomaly_factor", "trend_step"});
    read(a, "fall_trigger", k.fall_trigger, "adjustments");
    read(a, "fall_boost", k.fall_boost, "adjustments");
    read(a, "hr_boost", k.hr_boost, "adjustments");
    read(a, "spo2_boost", k.spo2_boost, "adjustments");
    read(a, "behavior_boost", k.behavior_boost, "adjustments");
    read(a, "anomaly_factor", k.anomaly_factor, "adjustments");
    read(a, "trend_step", k.trend_step, "adjustments");
  }
  if (j.contains("alert_thresholds")) {
    const auto& t = j["alert_thresholds"];
    check_keys(t, "alert_thresholds", {"yellow", "orange", "red"});
    read(t, "yellow", c.risk.thresholds.yellow, "alert_thresholds");
    read(t, "orange", c.risk.thresholds.orange, "alert_thresholds");
    read(t, "red", c.risk.thresholds.red, "alert_thresholds");
  }
  if (j.contains("post_fall")) {
    const auto& p = j["post_fall"];
    check_keys(p, "post_fall", {"fall_lookback_ms", "lying_ms"});
    read(p, "fall_lookback_ms", c.risk.post_fall.fall_lookback_ms, "post_fall");
    read(p, "lying_ms", c.risk.post_fall.lying_ms, "post_fall");
  }
  if (j.contains("quiet_hours")) {
    const auto& q = j["quiet_hours"];
    check_keys(q, "quiet_hours", {"start", "end"});
    if (q.contains("start")) c.quiet_hours.start = parse_clock(q["start"].get<std::string>());
    if (q.contains("end")) c.quiet_hours.end = parse_clock(q["end"].get<std::string>());
  }
  if (j.contains("elder_location")) c.elder_location = point_of(j["elder_location"], "elder_location");
  read(j, "volunteer_radius_m", c.volunteer_radius_m, root);
  read(j, "volunteer_accept_probability", c.volunteer_accept_probability, root);
  read(j, "dedup_window_ms", c.dedup_window_ms, root);
  if (j.contains("contacts")) {
    const auto& arr = j["contacts"];
    if (!arr.is_array()) fail("contacts: expected an array");
    c.contacts.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      c.contacts.push_back(contact_of(arr[i], "contacts[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("channels")) {
    const auto& ch = j["channels"];
    check_keys(ch, "channels", {"sms", "push", "call"});
    for (const auto& [name, value] : ch.items()) {
      const std::string where = "channels." + name;
      check_keys(value, where, {"mean_ms", "jitter_ms", "success"});
      auto& p = c.channels.params(channel_of(name, "channels"));
      read(value, "mean_ms", p.mean_ms, where);
      read(value, "jitter_ms", p.jitter_ms, where);
      read(value, "success", p.success, where);
    }
  }
  if (j.contains("closed_channels")) {
    std::vector<std::string> names;
    read(j, "closed_channels", names, root);
    c.closed_channels.clear();
    for (const auto& n : names) c.closed_channels.push_back(channel_of(n, "closed_channels"));
  }
  if (j.contains("stage_latency_ms")) {
    const auto& s = j["stage_latency_ms"];
    check_keys(s, "stage_latency_ms",
               {"ble", "fusion", "inference_rule", "inference_dl", "risk", "dispatch"});
    read(s, "ble", c.stages.ble, "stage_latency_ms");
    read(s, "fusion", c.stages.fusion, "stage_latency_ms");
    read(s, "inference_rule", c.stages.inference_rule, "stage_latency_ms");
    read(s, "inference_dl", c.stages.inference_dl, "stage_latency_ms");
    read(s, "risk", c.stages.risk, "stage_latency_ms");
    read(s, "dispatch", c.stages.dispatch, "stage_latency_ms");
  }
  if (j.contains("inference_mode")) {
    const auto mode = j["inference_mode"].get<std::string>();
    if (mode == "rule") {
      c.inference_mode = InferenceMode::Rule;
    } else if (mode == "dl") {
      c.inference_mode = InferenceMode::DeepLearning;
    } else {
      fail("inference_mode must be 'rule' or 'dl'");
    }
  }
  if (j.contains("uplink")) {
    const auto& u = j["uplink"];
    check_keys(u, "uplink",
               {"gateway_id", "transit_ms", "buffer_capacity", "heartbeat_interval_ms", "outages"});
    read(u, "gateway_id", c.uplink.gateway_id, "uplink");
    read(u, "transit_ms", c.uplink.transit_ms, "uplink");
    read(u, "buffer_capacity", c.uplink.buffer_capacity, "uplink");
    read(u, "heartbeat_interval_ms", c.heartbeat_interval_ms, "uplink");
    if (u.contains("outages")) {
      const auto& arr = u["outages"];
      if (!arr.is_array()) fail("uplink.outages: expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "uplink.outages[" + std::to_string(i) + "]";
        check_keys(arr[i], where, {"start_ms", "end_ms"});
        Outage o;
        read(arr[i], "start_ms", o.start_ms, where);
        read(arr[i], "end_ms", o.end_ms, where);
        c.outages.push_back(o);
      }
    }
  }
  read(j, "manual_triggers_ms", c.manual_triggers_ms, root);
  c.validate();
  return c;
}

ordered_json config_to_json(const SimConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["elder_id"] = c.elder_id;
  j["clock_anchor"] = format_clock(c.clock_anchor_ms);
  j["window"] = {{"size_ms", c.window.window_ms},
                 {"hop_ms", c.window.hop_ms},
                 {"tolerance_ms", c.window.tolerance_ms},
                 {"capacity_per_type", c.window.capacity_per_type}};
  ordered_json weights = ordered_json::object();
  for (const auto& [type, w] : c.fusion.weights.weights()) weights[std::string(to_string(type))] = w;
  j["sensor_weights"] = weights;
  ordered_json rooms = ordered_json::object();
  for (const auto& [id, room] : c.fusion.sensor_rooms) rooms[id] = room;
  j["sensor_rooms"] = rooms;
  const auto& a = c.fusion.anomaly;
  j["anomaly"] = {{"hr_low", a.hr_low},
                  {"hr_high", a.hr_high},
                  {"hr_stddev", a.hr_stddev},
                  {"spo2_low", a.spo2_low},
                  {"spo2_drop", a.spo2_drop},
                  {"motion_raw_limit", a.motion_raw_limit},
                  {"active_mean", a.active_mean},
                  {"still_after_active", a.still_after_active},
                  {"hr_contribution", a.hr_contribution},
                  {"spo2_contribution", a.spo2_contribution},
                  {"motion_contribution", a.motion_contribution}};
  j["risk_weights"] = {{"fall", c.risk.weights.fall},
                       {"health", c.risk.weights.health},
                       {"behavior", c.risk.weights.behavior},
                       {"anomaly", c.risk.weights.anomaly}};
  const auto& k = c.risk.adjustments;
  j["adjustments"] = {{"fall_trigger", k.fall_trigger},     {"fall_boost", k.fall_boost},
                      {"hr_boost", k.hr_boost},             {"spo2_boost", k.spo2_boost},
                      {"behavior_boost", k.behavior_boost}, {"anomaly_factor", k.anomaly_factor},
                      {"trend_step", k.trend_step}};
  j["alert_thresholds"] = {{"yellow", c.risk.thresholds.yellow},
                           {"orange", c.risk.thresholds.orange},
                           {"red", c.risk.thresholds.red}};
  j["post_fall"] = {{"fall_lookback_ms", c.risk.post_fall.fall_lookback_ms},
                    {"lying_ms", c.risk.post_fall.lying_ms}};
  j["quiet_hours"] = {{"start", format_clock(c.quiet_hours.start)},
                      {"end", format_clock(c.quiet_hours.end)}};
  j["elder_location"] = point_json(c.elder_location);
  j["volunteer_radius_m"] = c.volunteer_radius_m;
  j["volunteer_accept_probability"] = c.volunteer_accept_probability;
  j["dedup_window_ms"] = c.dedup_window_ms;
  ordered_json contacts = ordered_json::array();
  for (const auto& ct : c.contacts) {
    ordered_json e;
    e["id"] = ct.contact_id;
    e["role"] = std::string(to_string(ct.role));
    e["phone"] = ct.phone;
    e["has_app"] = ct.has_app;
    if (ct.location) e["location"] = point_json(*ct.location);
    if (ct.role == ContactRole::Volunteer) e["available"] = ct.available;
    contacts.push_back(e);
  }
  j["contacts"] = contacts;
  ordered_json channels = ordered_json::object();
  for (auto ch : {Channel::Sms, Channel::Push, Channel::Call}) {
    const auto& p = c.channels.params(ch);
    channels[std::string(to_string(ch))] = {
        {"mean_ms", p.mean_ms}, {"jitter_ms", p.jitter_ms}, {"success", p.success}};
  }
  j["channels"] = channels;
  ordered_json closed = ordered_json::array();
  for (auto ch : c.closed_channels) closed.push_back(std::string(to_string(ch)));
  j["closed_channels"] = closed;
  j["stage_latency_ms"] = {{"ble", c.stages.ble},
                           {"fusion", c.stages.fusion},
                           {"inference_rule", c.stages.inference_rule},
                           {"inference_dl", c.stages.inference_dl},
                           {"risk", c.stages.risk},
                           {"dispatch", c.stages.dispatch}};
  j["inference_mode"] = c.inference_mode == InferenceMode::Rule ? "rule" : "dl";
  ordered_json outages = ordered_json::array();
  for (const auto& o : c.outages) outages.push_back({{"start_ms", o.start_ms}, {"end_ms", o.end_ms}});
  j["uplink"] = {{"gateway_id", c.uplink.gateway_id},
                 {"transit_ms", c.uplink.transit_ms},
                 {"buffer_capacity", c.uplink.buffer_capacity},
                 {"heartbeat_interval_ms", c.heartbeat_interval_ms},
                 {"outages", outages}};
  j["manual_triggers_ms"] = c.manual_triggers_ms;
  return j;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace eldercare::sim
