#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eldercare/sim/report.hpp"
#include "eldercare/sim/scenario.hpp"
#include "eldercare/sim/simulator.hpp"

using namespace eldercare;
using namespace eldercare::sim;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("eldercare_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<json> parse_lines(const std::vector<std::string>& lines) {
  std::vector<json> out;
  for (const auto& l : lines) out.push_back(json::parse(l));
  return out;
}

std::vector<json> alerts_of(const RunOutput& out) {
  std::vector<json> a;
  for (auto& j : parse_lines(out.alert_log)) {
    if (j["event"] == "alert") a.push_back(j);
  }
  return a;
}

}  // namespace

// --- channels ---------------------------------------------------------------

TEST(Channel, ZeroJitterIsExact) {
  SimRng rng(1);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(simulate_channel({1500, 0, 1.0}, rng).latency_ms, 1500);
}

TEST(Channel, CertainSuccess) {
  SimRng rng(2);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(simulate_channel({800, 200, 1.0}, rng).delivered);
}

TEST(Channel, LatencyStaysInJitterBand) {
  SimRng rng(3);
  for (int i = 0; i < 5000; ++i) {
    auto o = simulate_channel({1500, 300, 0.985}, rng);
    ASSERT_GE(o.latency_ms, 1200);
    ASSERT_LE(o.latency_ms, 1800);
  }
}

TEST(Channel, EmpiricalSuccessRate) {
  SimRng rng(4);
  int ok = 0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) ok += simulate_channel({1500, 300, 0.985}, rng).delivered;
  EXPECT_NEAR(ok / static_cast<double>(n), 0.985, 0.005);
}

TEST(Channel, ParamsValidation) {
  EXPECT_THROW((ChannelParams{0, 0, 0.5}.validate("sms")), std::invalid_argument);
  EXPECT_THROW((ChannelParams{100, 100, 0.5}.validate("sms")), std::invalid_argument);
  EXPECT_THROW((ChannelParams{100, 10, 1.5}.validate("sms")), std::invalid_argument);
  EXPECT_NO_THROW((ChannelParams{100, 10, 1.0}.validate("sms")));
}

// --- config -------------------------------------------------------------------

TEST(Config, DefaultsValidateAndRoundTrip) {
  auto c = default_config();
  EXPECT_NO_THROW(c.validate());
  auto again = config_from_json(json::parse(config_to_json(c).dump()));
  EXPECT_EQ(config_to_json(again).dump(), config_to_json(c).dump());
}

TEST(Config, OverridesAndRejections) {
  auto c = config_from_json(json::parse(R"({"seed": 9, "quiet_hours": {"start": "23:30", "end": "06:00"}})"));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.quiet_hours.start, parse_clock("23:30"));
  EXPECT_THROW(config_from_json(json::parse(R"({"sed": 9})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"alert_thresholds": {"yellow": 0.7}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"channels": {"sms": {"success": 2}}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"sensor_weights": {"camera": 0}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"inference_mode": "magic"})")), ConfigError);
}

TEST(Config, Clock) {
  EXPECT_EQ(parse_clock("07:00"), 7 * 3600'000);
  EXPECT_EQ(format_clock(parse_clock("22:15")), "22:15");
  EXPECT_THROW(parse_clock("25:00"), ConfigError);
  EXPECT_THROW(parse_clock("7am"), ConfigError);
}

// --- traces -------------------------------------------------------------------

TEST(Trace, EmptyInput) {
  std::istringstream in("");
  auto t = parse_trace(in);
  EXPECT_TRUE(t.readings.empty());
}

TEST(Trace, ThreeLinesSorted) {
  std::istringstream in(
      "# header\n"
      "2000,wb-1,wristband,hr=70;spo2=97\n"
      "0,wb-1,wristband,ax=0;ay=0;az=9.81\n"
      "1000,camera-living,camera,posture=sitting;conf=0.8\n");
  auto t = parse_trace(in);
  ASSERT_EQ(t.readings.size(), 3u);
  EXPECT_EQ(t.readings[0].timestamp, 0);
  EXPECT_EQ(t.readings[1].timestamp, 1000);
  EXPECT_EQ(t.readings[2].timestamp, 2000);
  EXPECT_TRUE(std::holds_alternative<ImuPayload>(t.readings[0].payload));
  EXPECT_TRUE(std::holds_alternative<VitalsPayload>(t.readings[2].payload));
}

TEST(Trace, WrongColumnCountNamesLine) {
  std::istringstream in("0,wb-1,wristband,hr=70\n1,wb-1,wristband,hr=70,extra\n");
  try {
    parse_trace(in);
    FAIL() << "expected a parse error";
  } catch (const TraceParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Trace, UnknownSensorTypeIsCountedNotFatal) {
  std::istringstream in("0,x,thermostat,t=21\n5,wb-1,wristband,hr=70\n");
  auto t = parse_trace(in);
  EXPECT_EQ(t.rejected_lines, 1u);
  EXPECT_EQ(t.readings.size(), 1u);
}

TEST(Trace, BadValuesAreErrors) {
  for (const char* bad : {"-5,wb-1,wristband,hr=70\n", "x,wb-1,wristband,hr=70\n",
                          "0,wb-1,wristband,hr=abc\n", "0,door-front,door,opened=2\n",
                          "0,cam,camera,posture=flying\n", "0,wb-1,wristband,\n",
                          "0,wb-1,wristband,ax=1;ay=2\n", "0,wb-1,wristband,hr=1;bogus=2\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(parse_trace(in), TraceParseError) << bad;
  }
}

TEST(Trace, OutageDirective) {
  std::istringstream in("#!outage 1000 5000\n0,wb-1,wristband,hr=70\n");
  auto t = parse_trace(in);
  ASSERT_EQ(t.outages.size(), 1u);
  EXPECT_EQ(t.outages[0], (Outage{1000, 5000}));
}

TEST(TraceProperty, WriteParseRoundTrip) {
  for (auto kind : {ScenarioKind::Fall, ScenarioKind::Outage, ScenarioKind::Wandering}) {
    auto t = generate_scenario(kind, 30, 5);
    std::stringstream ss;
    write_trace(ss, t, "round trip");
    auto back = parse_trace(ss);
    ASSERT_EQ(back.readings.size(), t.readings.size());
    ASSERT_EQ(back.outages, t.outages);
    for (std::size_t i = 0; i < t.readings.size(); ++i) {
      ASSERT_EQ(format_reading(back.readings[i]), format_reading(t.readings[i]));
    }
  }
}

// --- scenarios ----------------------------------------------------------------

TEST(Scenario, DeterministicInSeed) {
  auto a = generate_scenario(ScenarioKind::Normal, 60, 1);
  auto b = generate_scenario(ScenarioKind::Normal, 60, 1);
  auto c = generate_scenario(ScenarioKind::Normal, 60, 2);
  std::stringstream sa, sb, sc;
  write_trace(sa, a);
  write_trace(sb, b);
  write_trace(sc, c);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str(), sc.str());
  EXPECT_THROW(generate_scenario(ScenarioKind::Normal, 0, 1), std::invalid_argument);
}

TEST(Scenario, FallShapeHasImpactAndFreeFall) {
  auto t = generate_scenario(ScenarioKind::Fall, 60, 1);
  const Millis onset = fall_onset_ms(60);
  double peak = 0, trough = 1e9;
  for (const auto& r : t.readings) {
    const auto* imu = std::get_if<ImuPayload>(&r.payload);
    if (!imu || r.sensor_type != SensorType::Wristband) continue;
    if (r.timestamp < onset || r.timestamp > onset + 800) continue;
    peak = std::max(peak, imu->accel.norm());
    trough = std::min(trough, imu->accel.norm());
  }
  EXPECT_GE(peak, 3 * kGravity);
  EXPECT_LT(trough, 0.5 * kGravity);
}

TEST(Scenario, FallRaisesAlertWithFallSection) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Fall, 120, 11));
  bool found = false;
  for (const auto& a : alerts_of(out)) {
    if (!a["risk_detail"].contains("fall")) continue;
    found = true;
    EXPECT_EQ(a["risk_detail"]["fall"]["posture_before"], "standing");
    EXPECT_EQ(a["risk_detail"]["fall"]["posture_after"], "lying");
  }
  EXPECT_TRUE(found);
}

TEST(Scenario, HypoxiaFlagsSpo2) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Hypoxia, 90, 3));
  bool flagged = false;
  for (const auto& f : parse_lines(out.fusion_log)) {
    for (const auto& h : f["health_flags"]) flagged |= h == "spo2";
  }
  EXPECT_TRUE(flagged);
}

TEST(Scenario, NormalDayIsQuiet) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Normal, 600, 21));
  EXPECT_TRUE(alerts_of(out).empty());
  EXPECT_EQ(out.metrics.notifications, 0u);
}

TEST(Scenario, WanderingTriggersAgitationAndLocationAnomaly) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Wandering, 60, 4));
  bool agitation = false, location = false;
  for (const auto& f : parse_lines(out.fusion_log)) {
    for (const auto& b : f["behavior_flags"]) {
      agitation |= b == "agitation";
      location |= b == "location_anomaly";
    }
  }
  EXPECT_TRUE(agitation);
  EXPECT_TRUE(location);
}

TEST(Scenario, OutageBuffersThenReplaysWithoutLoss) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Outage, 300, 8));
  EXPECT_GT(out.metrics.uplink_buffered, 0u);
  EXPECT_EQ(out.metrics.uplink_replayed, out.metrics.uplink_buffered);
  EXPECT_EQ(out.metrics.uplink_dropped, 0u);
  ASSERT_EQ(out.cloud_sequences.size(), out.metrics.uplink_published);
  EXPECT_TRUE(std::is_sorted(out.cloud_sequences.begin(), out.cloud_sequences.end()));
}

// --- simulator ----------------------------------------------------------------

TEST(Simulator, SameInputsSameDigest) {
  auto trace = generate_scenario(ScenarioKind::Fall, 120, 5);
  auto a = run(default_config(), trace);
  auto b = run(default_config(), trace);
  EXPECT_EQ(a.metrics.digest, b.metrics.digest);
  EXPECT_EQ(a.alert_log, b.alert_log);
  EXPECT_EQ(a.notification_log, b.notification_log);
  auto other = default_config();
  other.seed = 6;
  EXPECT_NE(run(other, trace).notification_log, a.notification_log);
}

TEST(Simulator, EventsProcessedInTimeOrder) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Fall, 120, 5));
  EXPECT_TRUE(std::is_sorted(out.event_times.begin(), out.event_times.end()));
}

TEST(Simulator, LatencyDecomposesIntoStages) {
  auto cfg = default_config();
  cfg.manual_triggers_ms = {5000};
  auto out = run(cfg, generate_scenario(ScenarioKind::Fall, 120, 5));
  ASSERT_FALSE(out.alert_timings.empty());
  for (const auto& t : out.alert_timings) {
    EXPECT_EQ(t.end_to_end, t.ble + t.fusion + t.inference + t.risk + t.dispatch + t.channel);
  }
  for (const auto& a : alerts_of(out)) {
    const auto& l = a["latency_ms"];
    EXPECT_EQ(l["end_to_end"].get<Millis>(),
              l["ble"].get<Millis>() + l["fusion"].get<Millis>() + l["inference"].get<Millis>() +
                  l["risk"].get<Millis>() + l["dispatch"].get<Millis>() + l["channel"].get<Millis>());
  }
}

TEST(Simulator, RedAlertsUnderThreeSeconds) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Fall, 120, 5));
  int reds = 0;
  for (const auto& t : out.alert_timings) {
    if (t.level != AlertLevel::Red) continue;
    ++reds;
    EXPECT_LT(t.end_to_end, 3000);
  }
  EXPECT_GT(reds, 0);
}

TEST(Simulator, ManualTriggerIsRedAndReachesEveryTier) {
  auto cfg = default_config();
  cfg.manual_triggers_ms = {10'000, 11'000};
  auto out = run(cfg, generate_scenario(ScenarioKind::Normal, 30, 2));
  auto alerts = alerts_of(out);
  ASSERT_EQ(alerts.size(), 2u);
  EXPECT_NE(alerts[0]["alert_id"], alerts[1]["alert_id"]);
  for (const auto& a : alerts) {
    EXPECT_EQ(a["level"], "RED");
    EXPECT_EQ(a["source"], "manual");
  }
  EXPECT_EQ(out.metrics.manual_alerts, 2u);
  bool family = false, doctor = false, volunteer = false;
  for (const auto& n : parse_lines(out.notification_log)) {
    const std::string who = n["recipient"];
    family |= who.starts_with("family");
    doctor |= who.starts_with("doctor");
    volunteer |= who.starts_with("volunteer");
  }
  EXPECT_TRUE(family && doctor && volunteer);
}

TEST(Simulator, NoneLevelNeverNotifies) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Hypoxia, 90, 3));
  std::size_t non_none = 0;
  for (const auto& f : parse_lines(out.fusion_log)) non_none += f["level"] != "NONE";
  EXPECT_LE(alerts_of(out).size(), non_none);
}

TEST(Simulator, ClosedChannelsCountAsFailures) {
  auto cfg = default_config();
  cfg.closed_channels = {Channel::Sms, Channel::Push, Channel::Call};
  cfg.manual_triggers_ms = {1000};
  auto out = run(cfg, generate_scenario(ScenarioKind::Normal, 10, 2));
  EXPECT_GT(out.metrics.notifications, 0u);
  EXPECT_EQ(out.metrics.delivered, 0u);
}

TEST(Simulator, EmptyTraceRuns) {
  auto out = run(default_config(), Trace{});
  EXPECT_EQ(out.metrics.windows, 1u);
  EXPECT_FALSE(out.metrics.digest.empty());
}

// --- reports ------------------------------------------------------------------

TEST(Report, ZeroAlertRunStillHasTable) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Normal, 30, 2));
  const auto text = render_report(out.metrics);
  for (const auto& stage : kStageNames) EXPECT_NE(text.find(stage), std::string::npos) << stage;
  EXPECT_NE(text.find("dispatch            0        -        -        -"), std::string::npos);
  EXPECT_NE(text.find("RED        0"), std::string::npos);
}

TEST(Report, RedAlertFillsStageRows) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Fall, 120, 5));
  for (const char* stage : {"fusion", "inference", "risk", "dispatch", "channel"}) {
    ASSERT_TRUE(out.metrics.stages.contains(stage));
    EXPECT_GT(out.metrics.stages.at(stage).count, 0u) << stage;
  }
  EXPECT_EQ(out.metrics.stages.at("fusion").p50, 15);
  EXPECT_EQ(out.metrics.stages.at("inference").p50, 5);
  EXPECT_EQ(out.metrics.stages.at("risk").p50, 10);
}

TEST(Report, MetricsJsonRoundTrip) {
  auto out = run(default_config(), generate_scenario(ScenarioKind::Fall, 60, 5));
  auto back = metrics_from_json(json::parse(metrics_to_json(out.metrics).dump()));
  EXPECT_EQ(render_report(back), render_report(out.metrics));
}

TEST(Report, IdenticalRunsWriteIdenticalFiles) {
  auto trace = generate_scenario(ScenarioKind::Outage, 120, 9);
  auto d1 = scratch("a"), d2 = scratch("b");
  write_outputs(run(default_config(), trace), d1);
  write_outputs(run(default_config(), trace), d2);
  for (const char* f : {"fusion.ndjson", "alerts.ndjson", "notifications.ndjson", "uplink.ndjson",
                        "metrics.json", "report.txt"}) {
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
    EXPECT_FALSE(slurp(d1 / f).empty() && std::string(f) == "report.txt");
  }
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST(Report, UnwritableDirectoryThrows) {
  RunMetrics m;
  EXPECT_THROW(write_report(m, "/nonexistent-dir/for/sure"), std::runtime_error);
}

TEST(Summary, NearestRank) {
  auto s = summarize({5, 1, 4, 2, 3});
  EXPECT_EQ(s.count, 5u);
  EXPECT_EQ(s.p50, 3);
  EXPECT_EQ(s.p95, 5);
  EXPECT_EQ(s.max, 5);
  EXPECT_EQ(summarize({}).count, 0u);
}
