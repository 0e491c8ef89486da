#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "eldercare/sim/config.hpp"
#include "eldercare/types.hpp"

namespace eldercare::sim {

/// Malformed trace line; the message names the 1-based line number.
class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Trace {
  std::vector<SensorReading> readings;  // sorted by timestamp
  std::vector<Outage> outages;          // from "#!outage START END" directives
  std::size_t rejected_lines = 0;       // unknown sensor types
};

/// Text format, one reading per line:
///   t_ms,sensor_id,sensor_type,key=value;key=value;...
/// Lines starting with '#' are comments, except "#!outage START END".
Trace parse_trace(std::istream& in);
Trace load_trace(const std::filesystem::path& path);

std::string format_reading(const SensorReading& reading);
void write_trace(std::ostream& out, const Trace& trace, const std::string& header = {});

}  // namespace eldercare::sim
