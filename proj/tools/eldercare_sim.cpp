// Command-line driver: generate traces, replay them, print reports.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "eldercare/sim/report.hpp"
#include "eldercare/sim/scenario.hpp"
#include "eldercare/sim/simulator.hpp"

namespace es = eldercare::sim;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-home elder monitoring pipeline simulator"};
  app.require_subcommand(1);

  std::string trace_path, config_path, out_dir;
  std::uint64_t seed = 1;
  bool seed_given = false;
  auto* run = app.add_subcommand("run", "Replay a trace through the pipeline");
  run->add_option("--trace", trace_path, "Trace file")->required();
  run->add_option("--config", config_path, "JSON config file (defaults when omitted)");
  run->add_option("--seed", seed, "Seed, overrides the config")->each([&](const std::string&) {
    seed_given = true;
  });
  run->add_option("--out", out_dir, "Output directory")->required();

  std::string scenario, gen_out;
  double duration = 0.0;
  std::uint64_t gen_seed = 1;
  int imu_hz = 20;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic trace");
  gen->add_option("--scenario", scenario, "normal | fall | hypoxia | wandering | outage")->required();
  gen->add_option("--duration", duration, "Seconds")->required();
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--imu-hz", imu_hz, "Wristband IMU rate");
  gen->add_option("--out", gen_out, "Output trace file")->required();

  std::string metrics_path;
  auto* report = app.add_subcommand("report", "Print the report for a metrics.json");
  report->add_option("--metrics", metrics_path, "metrics.json from a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", first_line(e.what()).c_str());
    return 2;
  }

  try {
    if (*run) {
      auto config = config_path.empty() ? es::default_config() : es::load_config(config_path);
      if (seed_given) config.seed = seed;
      config.validate();
      const auto trace = es::load_trace(trace_path);
      const auto output = es::run(config, trace);
      es::write_outputs(output, out_dir);
      std::cout << es::render_report(output.metrics);
      std::printf("host time %.1f ms\n", output.host_ms);
    } else if (*gen) {
      const auto kind = es::parse_scenario(scenario);
      if (!kind) throw std::invalid_argument("unknown scenario '" + scenario + "'");
      const auto trace = es::generate_scenario(*kind, duration, gen_seed, {imu_hz});
      const std::filesystem::path out_path(gen_out);
      if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + gen_out);
      es::write_trace(out, trace, "scenario " + scenario);
      if (!out) throw std::runtime_error("write failed for " + gen_out);
    } else if (*report) {
      std::cout << es::render_report(es::load_metrics(metrics_path));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", first_line(e.what()).c_str());
    return 1;
  }
  return 0;
}
