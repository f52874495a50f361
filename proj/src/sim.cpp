#include "relloc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relloc/lie_group.hpp"

namespace relloc {

std::string to_string(ControllerVariant v) {
  switch (v) {
    case ControllerVariant::kIdeal: return "ideal";
    case ControllerVariant::kEstimated: return "estimated";
    case ControllerVariant::kAlgorithm1: return "algorithm1";
  }
  return "?";
}

std::string to_string(EstimateSharing s) {
  return s == EstimateSharing::kPerAgent ? "per-agent" : "per-edge-owner";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::kConverged: return "converged";
    case Outcome::kStuckWrongShape: return "stuck_wrong_shape";
    case Outcome::kTranslatingDrift: return "translating_drift";
    case Outcome::kShapeOkEstimatesStale: return "shape_ok_estimates_stale";
    case Outcome::kUnclassified: return "unclassified";
  }
  return "?";
}

ControllerVariant parse_variant(const std::string& s) {
  if (s == "ideal") return ControllerVariant::kIdeal;
  if (s == "estimated") return ControllerVariant::kEstimated;
  if (s == "algorithm1") return ControllerVariant::kAlgorithm1;
  throw DomainError("unknown controller variant '" + s + "'");
}

EstimateSharing parse_sharing(const std::string& s) {
  if (s == "per-agent") return EstimateSharing::kPerAgent;
  if (s == "per-edge-owner") return EstimateSharing::kPerEdgeOwner;
  throw DomainError("unknown estimate sharing '" + s + "'");
}

Outcome parse_outcome(const std::string& s) {
  for (Outcome o : {Outcome::kConverged, Outcome::kStuckWrongShape, Outcome::kTranslatingDrift,
                    Outcome::kShapeOkEstimatesStale, Outcome::kUnclassified}) {
    if (to_string(o) == s) return o;
  }
  throw DomainError("unknown outcome label '" + s + "'");
}

void ScenarioConfig::validate() const {
  const int o = graph.agent_count();
  const int m = graph.edge_count();
  if (distances.size() != m) throw DomainError("need one desired distance per edge");
  if (static_cast<int>(mismatch.a.size()) != m) throw DomainError("need one mismatch per edge");
  for (double a : mismatch.a) {
    if (!std::isfinite(a)) throw DomainError("mismatch values must be finite");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw DomainError("duration must be positive");
  if (variant == ControllerVariant::kAlgorithm1 && sharing != EstimateSharing::kPerEdgeOwner) {
    throw DomainError("algorithm1 requires per-edge-owner sharing");
  }
  noise.validate();
  if (!(offset_bound >= 0.0)) throw DomainError("offset_bound must be non-negative");
  if (offset_bound == 0.0 && !(initial_position_var > 0.0)) {
    throw DomainError("offset_bound = 0 needs an explicit initial_position_var");
  }
  if (initial_positions && initial_positions->size() != 2 * o) {
    throw DomainError("initial positions must list every agent");
  }
  if (!initial_positions) {
    if (!(spread_box > 0.0)) throw DomainError("spread_box must be positive");
    if (!(min_separation >= 0.0)) throw DomainError("min_separation must be non-negative");
  }
  if (headings.size() != 0 && headings.size() != o) {
    throw DomainError("headings must list every agent");
  }
  if (!(stiffness_limit > 0.0)) throw DomainError("stiffness_limit must be positive");
  for (const InitialEstimate& ie : initial_estimates) {
    if (graph.find_edge(ie.agent, ie.neighbor) < 0) {
      throw DomainError("initial estimate for agents that share no edge");
    }
    const auto tracked = tracked_neighbors(*this, ie.agent);
    if (std::find(tracked.begin(), tracked.end(), ie.neighbor) == tracked.end()) {
      throw DomainError("initial estimate for a neighbor the agent does not track");
    }
  }
  const OutcomeThresholds& t = thresholds;
  if (!(t.tol_d > 0.0) || !(t.tol_e > 0.0) || !(t.tol_v > 0.0) || !(t.tol_c > 0.0) ||
      !(t.window_fraction > 0.0) || t.window_fraction > 1.0) {
    throw DomainError("outcome thresholds must be positive, window fraction in (0, 1]");
  }
}

std::int64_t ScenarioConfig::step_count() const {
  return std::max<std::int64_t>(1, std::llround(duration / dt));
}

double ScenarioConfig::position_variance() const {
  return initial_position_var > 0.0 ? initial_position_var : uniform_offset_variance(offset_bound);
}

double ScenarioConfig::heading_variance() const {
  return initial_heading_var > 0.0 ? initial_heading_var : noise.meas_heading_var;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

std::vector<int> tracked_neighbors(const ScenarioConfig& config, int agent) {
  if (config.sharing == EstimateSharing::kPerAgent) {
    return neighbors(config.graph, agent);
  }
  const EdgeOwnership ownership = assign_ownership(config.graph);
  std::vector<int> out;
  for (int k = 0; k < config.graph.edge_count(); ++k) {
    if (ownership.owner[k] != agent) continue;
    const Edge& e = config.graph.edge(k);
    out.push_back(e.tail == agent ? e.head : e.tail);
  }
  return out;
}

std::optional<Eigen::Vector2d> held_estimate(const WorldState& world, int i, int j) {
  const auto& filter = world.filters.at(i);
  if (!filter) return std::nullopt;
  const auto it = std::find(filter->neighbors.begin(), filter->neighbors.end(), j);
  if (it == filter->neighbors.end()) return std::nullopt;
  const int slot = static_cast<int>(it - filter->neighbors.begin());
  // the filter tracks p = r_j - r_i
  return Eigen::Vector2d(-filter->state.mean.p(slot));
}

namespace {

Eigen::VectorXd spread_positions(const ScenarioConfig& config) {
  std::mt19937_64 rng = make_stream(config.seed, kStreamPositions);
  std::uniform_real_distribution<double> coord(0.0, config.spread_box);
  const int o = config.graph.agent_count();
  Eigen::VectorXd r(2 * o);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (int i = 0; i < 2 * o; ++i) r(i) = coord(rng);
    bool ok = true;
    for (int i = 0; i < o && ok; ++i) {
      for (int j = i + 1; j < o && ok; ++j) {
        ok = (r.segment<2>(2 * i) - r.segment<2>(2 * j)).norm() >= config.min_separation;
      }
    }
    if (ok) return r;
  }
  throw DomainError("could not place agents with the requested separation");
}

void broadcast(const ScenarioConfig& config, WorldState& world) {
  const EdgeOwnership ownership = assign_ownership(config.graph);
  for (int k = 0; k < config.graph.edge_count(); ++k) {
    const Edge& e = config.graph.edge(k);
    const int owner = ownership.owner[k];
    const int other = owner == e.tail ? e.head : e.tail;
    if (const auto est = held_estimate(world, owner, other)) {
      world.shared[k] = owner == e.tail ? *est : Eigen::Vector2d(-*est);
    }
  }
}

RelativeEstimates estimate_tables(const ScenarioConfig& config, const WorldState& world) {
  const Graph& g = config.graph;
  RelativeEstimates tables(g.agent_count());
  for (int k = 0; k < g.edge_count(); ++k) {
    const Edge& e = g.edge(k);
    if (config.sharing == EstimateSharing::kPerEdgeOwner) {
      tables[e.tail][e.head] = world.shared[k];
      tables[e.head][e.tail] = -world.shared[k];
    } else {
      if (const auto est = held_estimate(world, e.tail, e.head)) tables[e.tail][e.head] = *est;
      if (const auto est = held_estimate(world, e.head, e.tail)) tables[e.head][e.tail] = *est;
    }
  }
  return tables;
}

// Bound on the Lipschitz constant of the control law in r.
double control_lipschitz_bound(const ScenarioConfig& config, const WorldState& world,
                               const Eigen::VectorXd& r) {
  const Graph& g = config.graph;
  const Eigen::VectorXd z1 = edge_vectors(g, r);
  const Eigen::VectorXd e = distance_errors(z1, config.distances);
  double bound = 0.0;
  for (int k = 0; k < g.edge_count(); ++k) {
    const Edge& edge = g.edge(k);
    const double zn = z1.segment<2>(2 * k).norm();
    double rho = zn;
    if (config.variant != ControllerVariant::kIdeal) {
      rho = world.shared[k].norm();
      if (const auto est = held_estimate(world, edge.tail, edge.head)) rho = std::max(rho, est->norm());
      if (const auto est = held_estimate(world, edge.head, edge.tail)) rho = std::max(rho, est->norm());
    }
    bound += 4.0 * rho * zn + 2.0 * std::abs(e(k)) + std::abs(config.mismatch.a[k]);
  }
  return bound;
}

}  // namespace

WorldState initial_world(const ScenarioConfig& config) {
  config.validate();
  const Graph& g = config.graph;
  const int o = g.agent_count();

  WorldState world;
  world.r = config.initial_positions ? *config.initial_positions : spread_positions(config);
  world.headings = config.headings.size() == o ? config.headings : Eigen::VectorXd::Zero(o);
  world.velocity = Eigen::VectorXd::Zero(2 * o);
  world.shared.assign(g.edge_count(), Eigen::Vector2d::Zero());
  world.filters.resize(o);
  world.noise_rng = make_stream(config.seed, kStreamNoise);

  std::mt19937_64 est_rng = make_stream(config.seed, kStreamEstimates);
  for (int i = 0; i < o; ++i) {
    const std::vector<int> tracked = tracked_neighbors(config, i);
    if (tracked.empty()) continue;
    Eigen::VectorXd p(2 * tracked.size());
    for (std::size_t k = 0; k < tracked.size(); ++k) {
      const int j = tracked[k];
      p.segment<2>(2 * k) = world.r.segment<2>(2 * j) - world.r.segment<2>(2 * i);
    }
    const GroupElement truth(std::move(p), world.headings(i));
    EstimatorState state = initialize(truth, config.offset_bound, est_rng,
                                      config.position_variance(), config.heading_variance());
    Eigen::VectorXd mean_p = state.mean.p();
    for (const InitialEstimate& ie : config.initial_estimates) {
      if (ie.agent != i) continue;
      const auto slot = std::find(tracked.begin(), tracked.end(), ie.neighbor) - tracked.begin();
      mean_p.segment<2>(2 * slot) = -ie.value;
    }
    state.mean = GroupElement(std::move(mean_p), state.mean.theta());
    world.filters[i] = AgentFilter{tracked, std::move(state)};
  }

  // Per-agent tables still get a tail-side copy so `shared` is always meaningful.
  for (int k = 0; k < g.edge_count(); ++k) {
    const Edge& e = g.edge(k);
    if (const auto est = held_estimate(world, e.tail, e.head)) {
      world.shared[k] = *est;
    } else if (const auto est2 = held_estimate(world, e.head, e.tail)) {
      world.shared[k] = -*est2;
    }
  }
  broadcast(config, world);
  return world;
}

Eigen::VectorXd control_velocities(const ScenarioConfig& config, const WorldState& world,
                                   const Eigen::VectorXd& r, const Eigen::VectorXd& e_noise) {
  const Graph& g = config.graph;
  if (config.variant == ControllerVariant::kIdeal) {
    return ideal_control(g, r, config.distances);
  }
  const Eigen::VectorXd e = distance_errors(edge_vectors(g, r), config.distances) + e_noise;
  if (config.variant == ControllerVariant::kEstimated) {
    return estimated_control(g, estimate_tables(config, world), e);
  }
  return mismatch_control(g, assign_ownership(g), world.shared, e, config.mismatch);
}

WorldState step(WorldState world, const ScenarioConfig& config) {
  const Graph& g = config.graph;
  const int o = g.agent_count();
  const double dt = config.dt;

  Eigen::VectorXd e_noise = Eigen::VectorXd::Zero(g.edge_count());
  if (config.inject_noise) {
    // e = 2 h - d^2, so the noise on e has twice the deviation of the noise on h
    std::normal_distribution<double> n01(0.0, 1.0);
    const double sd = 2.0 * std::sqrt(config.noise.meas_distance_var);
    for (int k = 0; k < g.edge_count(); ++k) e_noise(k) = sd * n01(world.noise_rng);
  }

  // 2. true-world RK4 with the estimate snapshot held over the step
  const double lipschitz = control_lipschitz_bound(config, world, world.r);
  const auto substeps = static_cast<int>(
      std::clamp(std::ceil(dt * lipschitz / config.stiffness_limit), 1.0, 1e6));
  const double h = dt / substeps;
  Eigen::VectorXd r = world.r;
  for (int s = 0; s < substeps; ++s) {
    const Eigen::VectorXd k1 = control_velocities(config, world, r, e_noise);
    const Eigen::VectorXd k2 = control_velocities(config, world, r + 0.5 * h * k1, e_noise);
    const Eigen::VectorXd k3 = control_velocities(config, world, r + 0.5 * h * k2, e_noise);
    const Eigen::VectorXd k4 = control_velocities(config, world, r + h * k3, e_noise);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  // each agent reports the velocity it actually realized over the step
  world.velocity = (r - world.r) / dt;
  world.r = std::move(r);

  // 3-4. filters
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int i = 0; i < o; ++i) {
    auto& filter = world.filters[i];
    if (!filter) continue;
    const int n = static_cast<int>(filter->neighbors.size());
    const Eigen::Matrix2d to_body = rotation(filter->state.mean.theta()).transpose();
    Eigen::VectorXd v(2 * n);
    Eigen::VectorXd y(n + 1);
    for (int k = 0; k < n; ++k) {
      const int j = filter->neighbors[k];
      v.segment<2>(2 * k) =
          to_body * (world.velocity.segment<2>(2 * j) - world.velocity.segment<2>(2 * i));
      y(k) = 0.5 * (world.r.segment<2>(2 * j) - world.r.segment<2>(2 * i)).squaredNorm();
    }
    y(n) = world.headings(i);
    if (config.inject_noise) {
      const double sd_d = std::sqrt(config.noise.meas_distance_var);
      const double sd_h = std::sqrt(config.noise.meas_heading_var);
      for (int k = 0; k < n; ++k) y(k) += sd_d * n01(world.noise_rng);
      y(n) += sd_h * n01(world.noise_rng);
    }
    filter->state = predict(filter->state, AlgebraElement(std::move(v), 0.0), dt, config.noise);
    try {
      filter->state = update(filter->state, y, config.noise);
    } catch (const SingularUpdateError&) {
      ++world.singular_updates;
    }
  }

  // 5. owners share for the next step
  broadcast(config, world);
  ++world.steps;
  world.t = static_cast<double>(world.steps) * dt;
  return world;
}

double centroid_speed(const Eigen::VectorXd& velocity) {
  const int o = static_cast<int>(velocity.size() / 2);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int i = 0; i < o; ++i) mean += velocity.segment<2>(2 * i);
  return (mean / o).norm();
}

double formation_angular_rate(const Eigen::VectorXd& r, const Eigen::VectorXd& velocity) {
  const int o = static_cast<int>(r.size() / 2);
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  Eigen::Vector2d vc = Eigen::Vector2d::Zero();
  for (int i = 0; i < o; ++i) {
    c += r.segment<2>(2 * i);
    vc += velocity.segment<2>(2 * i);
  }
  c /= o;
  vc /= o;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < o; ++i) {
    const Eigen::Vector2d d = r.segment<2>(2 * i) - c;
    const Eigen::Vector2d dv = velocity.segment<2>(2 * i) - vc;
    num += d.x() * dv.y() - d.y() * dv.x();
    den += d.squaredNorm();
  }
  return den > 0.0 ? num / den : 0.0;
}

MetricsRecord measure(const ScenarioConfig& config, const WorldState& world) {
  const Graph& g = config.graph;
  const Eigen::VectorXd z1 = edge_vectors(g, world.r);
  const Eigen::VectorXd e = distance_errors(z1, config.distances);

  MetricsRecord rec;
  rec.t = world.t;
  for (int k = 0; k < g.edge_count(); ++k) {
    const Edge& edge = g.edge(k);
    const Eigen::Vector2d zk = z1.segment<2>(2 * k);
    rec.distance.push_back(zk.norm());
    rec.distance_error.push_back(e(k));
    double err = 0.0;
    if (config.sharing == EstimateSharing::kPerEdgeOwner) {
      err = (world.shared[k] - zk).norm();
    } else {
      if (const auto est = held_estimate(world, edge.tail, edge.head)) err = std::max(err, (*est - zk).norm());
      if (const auto est = held_estimate(world, edge.head, edge.tail)) err = std::max(err, (*est + zk).norm());
    }
    rec.estimate_error.push_back(err);
  }
  rec.centroid_speed = centroid_speed(world.velocity);
  rec.angular_rate = formation_angular_rate(world.r, world.velocity);
  for (int i = 0; i < g.agent_count(); ++i) {
    rec.max_speed = std::max(rec.max_speed, world.velocity.segment<2>(2 * i).norm());
  }
  return rec;
}

MetricsSeries run(const ScenarioConfig& config) {
  MetricsSeries series;
  for (const Edge& e : config.graph.edges()) {
    const bool short_ids = e.tail < 9 && e.head < 9;
    series.edge_labels.push_back(short_ids
                                     ? std::to_string(e.tail + 1) + std::to_string(e.head + 1)
                                     : std::to_string(e.tail + 1) + "_" + std::to_string(e.head + 1));
  }
  series.desired = config.distances.values();

  WorldState world = initial_world(config);
  const std::int64_t steps = config.step_count();
  series.records.reserve(static_cast<std::size_t>(steps));
  for (std::int64_t s = 0; s < steps; ++s) {
    world = step(std::move(world), config);
    series.records.push_back(measure(config, world));
  }
  series.singular_updates = world.singular_updates;
  return series;
}

OutcomeSummary summarize(const MetricsSeries& series, const OutcomeThresholds& thresholds) {
  const auto total = static_cast<std::int64_t>(series.records.size());
  if (total == 0) {
    throw DomainError("cannot classify an empty series");
  }
  const auto window = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(thresholds.window_fraction * static_cast<double>(total))));
  if (window > total) {
    throw DomainError("series is shorter than the evaluation window");
  }

  OutcomeSummary s;
  constexpr double inf = std::numeric_limits<double>::infinity();
  s.min_abs_angular_rate = inf;
  s.min_centroid_speed = inf;
  s.min_max_abs_e = inf;
  for (auto idx = total - window; idx < total; ++idx) {
    const MetricsRecord& rec = series.records[idx];
    double max_abs_e = 0.0;
    // std::max drops NaN, so a diverged run is mapped to +inf explicitly
    auto worst = [&s](double acc, double v) {
      if (std::isfinite(v)) return std::max(acc, v);
      s.finite = false;
      return inf;
    };
    for (std::size_t k = 0; k < rec.distance.size(); ++k) {
      s.max_distance_error = worst(s.max_distance_error, std::abs(rec.distance[k] - series.desired[k]));
      s.max_estimation_error = worst(s.max_estimation_error, rec.estimate_error[k]);
      max_abs_e = worst(max_abs_e, std::abs(rec.distance_error[k]));
    }
    s.min_max_abs_e = std::min(s.min_max_abs_e, max_abs_e);
    if (!std::isfinite(rec.angular_rate) || !std::isfinite(rec.centroid_speed)) s.finite = false;
    s.min_abs_angular_rate = std::min(s.min_abs_angular_rate, std::abs(rec.angular_rate));
    s.min_centroid_speed = std::min(s.min_centroid_speed, rec.centroid_speed);
    s.max_agent_speed = worst(s.max_agent_speed, rec.max_speed);
  }
  return s;
}

Outcome detect_outcome(const MetricsSeries& series, const OutcomeThresholds& thresholds) {
  const OutcomeSummary s = summarize(series, thresholds);
  if (!s.finite) return Outcome::kUnclassified;
  const bool shape_ok = s.max_distance_error < thresholds.tol_d;
  const bool estimates_ok = s.max_estimation_error < thresholds.tol_e;
  const bool errors_persist = s.min_max_abs_e > thresholds.tol_e;
  if (shape_ok && estimates_ok) return Outcome::kConverged;
  if (shape_ok) return Outcome::kShapeOkEstimatesStale;
  if (errors_persist && s.min_centroid_speed > thresholds.tol_c) return Outcome::kTranslatingDrift;
  if (errors_persist && s.max_agent_speed < thresholds.tol_v) return Outcome::kStuckWrongShape;
  return Outcome::kUnclassified;
}

}  // namespace relloc
