#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "relloc/observability.hpp"
#include "relloc/sim.hpp"

namespace relloc {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Stable exit-code contract of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitUsage = 2,
  kExitRankDeficient = 3,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "RELLOC_OUT_DIR";

struct RunOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::string> scenario;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::filesystem::path> out;
};

struct ObservabilityOptions {
  std::optional<int> n;
  std::vector<double> p;
  double theta = 0.0;
  std::optional<std::uint64_t> random_seed;
  std::optional<std::filesystem::path> trajectory;
  double tol = kDefaultRankTolerance;
  double gramian_tol = kGramianTolerance;
  int depth = 1;
};

/// Output directory: the explicit one, else $RELLOC_OUT_DIR, else ./relloc_out.
std::filesystem::path resolve_out_dir(const std::optional<std::filesystem::path>& out);

/**
 * Trajectory CSV for the Gramian check. Each row is
 * t, x1, y1, ..., xn, yn, theta, vx1, vy1, ..., vxn, vyn, w
 * with a uniform time step; a first line starting with a letter is a header.
 * Throws ConfigError with the offending line.
 */
std::vector<TrajectorySample> read_trajectory_csv(const std::filesystem::path& path, double& dt);

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_check_observability(const ObservabilityOptions& options, std::ostream& out,
                            std::ostream& err);
int cmd_reproduce(const std::string& name, const std::optional<std::filesystem::path>& out_dir,
                  std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to the subcommands; returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relloc
