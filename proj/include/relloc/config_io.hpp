#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "relloc/sim.hpp"

namespace relloc {

/// Malformed or inconsistent scenario file. `line` is 1-based, 0 if unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, const std::string& message);
  const std::string& source() const { return source_; }
  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  std::string source_;
  int line_;
  std::string message_;
};

/// Shortest decimal text that reads back to the same double; never locale dependent.
std::string format_double(double value);

/**
 * Parses a YAML scenario file.
 *
 * Sections: scenario, graph, initial, noise, thresholds. `scenario.preset`
 * starts from a named preset and the remaining keys override it. Agent ids
 * are 1-based. A top-level `manifest` section is ignored so that a written
 * manifest can be fed back in.
 */
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Every field materialized; parse_config(write_config(c)) reproduces c exactly.
std::string write_config(const ScenarioConfig& config);

struct RunManifest {
  ScenarioConfig config;
  std::string version;
  std::vector<std::pair<std::string, std::string>> outputs;  // role, path
  Outcome outcome = Outcome::kUnclassified;
  OutcomeSummary summary;
  int singular_updates = 0;
};

/// The echoed config followed by a `manifest` section.
std::string write_manifest(const RunManifest& manifest);

/// Column names: t, dist_<edge>..., esterr_<edge>..., centroid_speed, angular_rate.
std::vector<std::string> metrics_header(const MetricsSeries& series);

/// One header line and one row per record. Throws std::runtime_error if any
/// value is not finite.
void write_metrics_csv(std::ostream& out, const MetricsSeries& series);

}  // namespace relloc
