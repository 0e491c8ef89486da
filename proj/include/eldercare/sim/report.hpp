#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "eldercare/sim/simulator.hpp"

namespace eldercare::sim {

nlohmann::ordered_json metrics_to_json(const RunMetrics& metrics);
RunMetrics metrics_from_json(const nlohmann::json& j);
RunMetrics load_metrics(const std::filesystem::path& path);

/// Plain-text summary: latency breakdown, alerts, delivery, uplink. The
/// layout is fixed so reports can be diffed byte for byte.
std::string render_report(const RunMetrics& metrics);

/// Writes report.txt into dir. Throws std::runtime_error if it cannot.
void write_report(const RunMetrics& metrics, const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, const std::string& body);

}  // namespace eldercare::sim
