#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "relloc/controller.hpp"
#include "relloc/estimator.hpp"
#include "relloc/network.hpp"

namespace relloc {

enum class ControllerVariant { kIdeal, kEstimated, kAlgorithm1 };
enum class EstimateSharing { kPerAgent, kPerEdgeOwner };

enum class Outcome {
  kConverged,
  kStuckWrongShape,
  kTranslatingDrift,
  kShapeOkEstimatesStale,
  kUnclassified,
};

std::string to_string(ControllerVariant v);
std::string to_string(EstimateSharing s);
std::string to_string(Outcome o);
ControllerVariant parse_variant(const std::string& s);
EstimateSharing parse_sharing(const std::string& s);
Outcome parse_outcome(const std::string& s);

/// Thresholds for classifying a finished run. Evaluated over the final
/// `window_fraction` of the records.
struct OutcomeThresholds {
  double tol_d = 0.5;    // max | |r_ij| - d_ij |
  double tol_e = 0.1;    // max |r̂_ij - r_ij|, and the floor for "e != 0"
  double tol_v = 1e-4;   // agent speed considered stopped
  double tol_c = 1e-3;   // centroid speed considered drifting
  double window_fraction = 0.1;
};

/// Agent i's initial estimate of r_ij = r_i - r_j (0-based ids).
struct InitialEstimate {
  int agent = 0;
  int neighbor = 0;
  Eigen::Vector2d value = Eigen::Vector2d::Zero();
};

struct ScenarioConfig {
  std::string name = "custom";
  Graph graph = Graph::complete(3);
  DesiredDistances distances = DesiredDistances::uniform(Graph::complete(3), 10.0);
  MismatchConfig mismatch = MismatchConfig::uniform(Graph::complete(3), 0.0);
  ControllerVariant variant = ControllerVariant::kAlgorithm1;
  EstimateSharing sharing = EstimateSharing::kPerEdgeOwner;

  double dt = 1e-3;
  double duration = 30.0;
  std::uint64_t seed = 1;

  NoiseConfig noise;
  bool inject_noise = false;

  // Estimator initialization. A non-positive position variance means
  // offset_bound^2 / 3; a non-positive heading variance means meas_heading_var.
  double offset_bound = 2.0;
  double initial_position_var = 0.0;
  double initial_heading_var = 0.0;
  std::vector<InitialEstimate> initial_estimates;  // overrides the random offsets

  // Either explicit positions (2o) or a uniform spread in [0, spread_box]^2
  // rejecting pairs closer than min_separation.
  std::optional<Eigen::VectorXd> initial_positions;
  double spread_box = 20.0;
  double min_separation = 1.0;
  Eigen::VectorXd headings;  // per agent, empty means all zero

  // RK4 substeps per step are chosen so that dt_sub * L <= stiffness_limit,
  // L being a bound on the Lipschitz constant of the control law.
  double stiffness_limit = 1.0;

  OutcomeThresholds thresholds;
  std::optional<Outcome> expected_outcome;

  /// Throws DomainError describing the first inconsistency.
  void validate() const;
  std::int64_t step_count() const;
  double position_variance() const;
  double heading_variance() const;
};

/// Filter run by one agent over the neighbors it tracks.
struct AgentFilter {
  std::vector<int> neighbors;  // 0-based agent ids; slot k of the state
  EstimatorState state;
};

struct WorldState {
  Eigen::VectorXd r;         // true positions, 2o
  Eigen::VectorXd headings;  // true headings, o
  std::vector<std::optional<AgentFilter>> filters;  // one slot per agent
  std::vector<Eigen::Vector2d> shared;  // last broadcast r̂ of r_tail - r_head per edge
  Eigen::VectorXd velocity;             // world-frame velocities applied in the last step
  std::int64_t steps = 0;
  double t = 0.0;
  int singular_updates = 0;
  std::mt19937_64 noise_rng;
};

struct MetricsRecord {
  double t = 0.0;
  std::vector<double> distance;        // |r_ij| per edge
  std::vector<double> estimate_error;  // |r̂_ij - r_ij| per edge, worst holder
  std::vector<double> distance_error;  // e_k per edge
  double centroid_speed = 0.0;
  double angular_rate = 0.0;
  double max_speed = 0.0;
};

struct MetricsSeries {
  std::vector<std::string> edge_labels;  // "12", "23", ... (1-based ids)
  std::vector<double> desired;
  std::vector<MetricsRecord> records;
  int singular_updates = 0;
};

/// Deterministic generator for an independent stream derived from the seed.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

inline constexpr std::uint64_t kStreamPositions = 1;
inline constexpr std::uint64_t kStreamEstimates = 2;
inline constexpr std::uint64_t kStreamNoise = 3;
inline constexpr std::uint64_t kStreamScenario = 4;

/// Tracked neighbors of `agent` under the configured sharing.
std::vector<int> tracked_neighbors(const ScenarioConfig& config, int agent);

/// Current estimate of r_i - r_j held by agent i, if i tracks j.
std::optional<Eigen::Vector2d> held_estimate(const WorldState& world, int i, int j);

WorldState initial_world(const ScenarioConfig& config);

/// Agent velocities for a world snapshot; distance errors come from `r`, the
/// estimates from the snapshot held in `world`.
Eigen::VectorXd control_velocities(const ScenarioConfig& config, const WorldState& world,
                                   const Eigen::VectorXd& r, const Eigen::VectorXd& e_noise);

/**
 * One closed-loop step:
 *  1. velocities from the held estimates and the measured distance errors,
 *  2. RK4 integration of the true positions over dt,
 *  3. body-frame relative velocities from the exchanged world velocities,
 *  4. predict and update of every agent filter with synthesized measurements,
 *  5. owners re-broadcast their edge estimates; t advances by dt.
 */
WorldState step(WorldState world, const ScenarioConfig& config);

MetricsRecord measure(const ScenarioConfig& config, const WorldState& world);

MetricsSeries run(const ScenarioConfig& config);

Outcome detect_outcome(const MetricsSeries& series, const OutcomeThresholds& thresholds);

/// Final-window summary used by the manifest and the acceptance checks.
struct OutcomeSummary {
  double max_distance_error = 0.0;
  double max_estimation_error = 0.0;
  double min_abs_angular_rate = 0.0;
  double min_centroid_speed = 0.0;
  double max_agent_speed = 0.0;
  double min_max_abs_e = 0.0;
  bool finite = true;  // false if any windowed metric diverged
};

OutcomeSummary summarize(const MetricsSeries& series, const OutcomeThresholds& thresholds);

ScenarioConfig scenario_nominal();
ScenarioConfig scenario_issue1();
ScenarioConfig scenario_issue2();
ScenarioConfig scenario_issue3();

/// Named preset lookup: nominal, issue1, issue2, issue3.
std::optional<ScenarioConfig> scenario_by_name(const std::string& name);

/// Velocity of the centroid and the best-fit rigid angular rate of a velocity field.
double centroid_speed(const Eigen::VectorXd& velocity);
double formation_angular_rate(const Eigen::VectorXd& r, const Eigen::VectorXd& velocity);

}  // namespace relloc
