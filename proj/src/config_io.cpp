#include "relloc/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace relloc {

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
      source_(std::move(source)),
      line_(line),
      message_(message) {}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    throw ConfigError(source_, node.Mark().line + 1, message);
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ConfigError(source_, line, message);
  }

  void expect_map(const YAML::Node& node, const std::string& what,
                  std::initializer_list<const char*> keys) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) fail(kv.first, "unknown key '" + key + "' in " + what);
    }
  }

  template <class T>
  T as(const YAML::Node& node, const std::string& what) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "cannot read " + what);
    }
  }

  double number(const YAML::Node& node, const std::string& what) const {
    const double v = as<double>(node, what);
    if (!std::isfinite(v)) fail(node, what + " must be finite");
    return v;
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) fail(node, what + " must be a list");
    std::vector<double> out;
    for (const auto& item : node) out.push_back(number(item, what));
    return out;
  }

  Eigen::Vector2d point(const YAML::Node& node, const std::string& what) const {
    const std::vector<double> xy = numbers(node, what);
    if (xy.size() != 2) fail(node, what + " must be [x, y]");
    return {xy[0], xy[1]};
  }

  // Converts a 1-based id to 0-based, checking the range.
  int agent(const YAML::Node& node, int agent_count, const std::string& what) const {
    const int id = as<int>(node, what);
    if (id < 1 || id > agent_count) {
      fail(node, what + " " + std::to_string(id) + " is outside 1.." + std::to_string(agent_count));
    }
    return id - 1;
  }

  template <class F>
  void guard(const YAML::Node& node, F&& f) const {
    try {
      f();
    } catch (const DomainError& e) {
      fail(node, e.what());
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

void set_if(const Reader& rd, const YAML::Node& map, const char* key, double& field) {
  if (const YAML::Node n = map[key]) field = rd.number(n, key);
}

// Scalar value broadcast to every edge, or one value per edge.
std::vector<double> per_edge(const Reader& rd, const YAML::Node& node, int edges,
                             const std::string& what) {
  if (node.IsScalar()) return std::vector<double>(edges, rd.number(node, what));
  std::vector<double> v = rd.numbers(node, what);
  if (static_cast<int>(v.size()) != edges) {
    rd.fail(node, what + " lists " + std::to_string(v.size()) + " values for " +
                      std::to_string(edges) + " edges");
  }
  return v;
}

void read_scenario(const Reader& rd, const YAML::Node& sec, ScenarioConfig& c) {
  rd.expect_map(sec, "scenario",
                {"preset", "name", "variant", "sharing", "seed", "dt", "duration",
                 "stiffness_limit", "expected_outcome"});
  if (const YAML::Node n = sec["name"]) c.name = rd.as<std::string>(n, "name");
  if (const YAML::Node n = sec["variant"]) {
    rd.guard(n, [&] { c.variant = parse_variant(rd.as<std::string>(n, "variant")); });
  }
  if (const YAML::Node n = sec["sharing"]) {
    rd.guard(n, [&] { c.sharing = parse_sharing(rd.as<std::string>(n, "sharing")); });
  }
  if (const YAML::Node n = sec["seed"]) c.seed = rd.as<std::uint64_t>(n, "seed");
  set_if(rd, sec, "dt", c.dt);
  set_if(rd, sec, "duration", c.duration);
  set_if(rd, sec, "stiffness_limit", c.stiffness_limit);
  if (const YAML::Node n = sec["expected_outcome"]) {
    const std::string label = rd.as<std::string>(n, "expected_outcome");
    if (label == "none") {
      c.expected_outcome.reset();
    } else {
      rd.guard(n, [&] { c.expected_outcome = parse_outcome(label); });
    }
  }
}

void read_graph(const Reader& rd, const YAML::Node& sec, ScenarioConfig& c) {
  rd.expect_map(sec, "graph", {"agents", "edges", "distances", "mismatch"});
  const YAML::Node agents = sec["agents"];
  const YAML::Node edges = sec["edges"];
  if (agents || edges) {
    int o = 0;
    if (agents) {
      o = rd.as<int>(agents, "agents");
      if (o < 1) rd.fail(agents, "agents must be at least 1");
    }
    if (!edges) {
      rd.guard(agents, [&] { c.graph = Graph::complete(o); });
    } else {
      if (!edges.IsSequence()) rd.fail(edges, "edges must be a list of [tail, head] pairs");
      if (!agents) {
        for (const auto& e : edges) {
          if (!e.IsSequence() || e.size() != 2) rd.fail(e, "edge must be [tail, head]");
          o = std::max({o, rd.as<int>(e[0], "edge tail"), rd.as<int>(e[1], "edge head")});
        }
      }
      std::vector<Edge> list;
      for (const auto& e : edges) {
        if (!e.IsSequence() || e.size() != 2) rd.fail(e, "edge must be [tail, head]");
        list.push_back({rd.agent(e[0], o, "edge tail"), rd.agent(e[1], o, "edge head")});
      }
      rd.guard(edges, [&] { c.graph = Graph(o, std::move(list)); });
    }
    if (!sec["distances"]) rd.fail(sec, "graph with new edges needs distances");
    c.mismatch = MismatchConfig::uniform(c.graph, 0.0);
    c.initial_estimates.clear();
    c.initial_positions.reset();
    c.headings.resize(0);
  }
  const int m = c.graph.edge_count();
  if (const YAML::Node n = sec["distances"]) {
    const std::vector<double> d = per_edge(rd, n, m, "distances");
    rd.guard(n, [&] { c.distances = DesiredDistances(d); });
  }
  if (const YAML::Node n = sec["mismatch"]) c.mismatch.a = per_edge(rd, n, m, "mismatch");
}

void read_initial(const Reader& rd, const YAML::Node& sec, ScenarioConfig& c) {
  rd.expect_map(sec, "initial",
                {"positions", "spread_box", "min_separation", "headings", "offset_bound",
                 "position_var", "heading_var", "estimates"});
  const int o = c.graph.agent_count();
  if (const YAML::Node n = sec["positions"]) {
    if (n.IsScalar() && rd.as<std::string>(n, "positions") == "random") {
      c.initial_positions.reset();
    } else {
      if (!n.IsSequence() || static_cast<int>(n.size()) != o) {
        rd.fail(n, "positions must list " + std::to_string(o) + " [x, y] pairs or be 'random'");
      }
      Eigen::VectorXd r(2 * o);
      for (int i = 0; i < o; ++i) r.segment<2>(2 * i) = rd.point(n[i], "position");
      c.initial_positions = r;
    }
  }
  set_if(rd, sec, "spread_box", c.spread_box);
  set_if(rd, sec, "min_separation", c.min_separation);
  if (const YAML::Node n = sec["headings"]) {
    const std::vector<double> h = rd.numbers(n, "headings");
    if (!h.empty() && static_cast<int>(h.size()) != o) {
      rd.fail(n, "headings must list " + std::to_string(o) + " values");
    }
    c.headings = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
  }
  set_if(rd, sec, "offset_bound", c.offset_bound);
  set_if(rd, sec, "position_var", c.initial_position_var);
  set_if(rd, sec, "heading_var", c.initial_heading_var);
  if (const YAML::Node n = sec["estimates"]) {
    if (!n.IsSequence()) rd.fail(n, "estimates must be a list");
    c.initial_estimates.clear();
    for (const auto& item : n) {
      rd.expect_map(item, "estimate", {"agent", "neighbor", "value"});
      for (const char* key : {"agent", "neighbor", "value"}) {
        if (!item[key]) rd.fail(item, std::string("estimate needs '") + key + "'");
      }
      InitialEstimate ie;
      ie.agent = rd.agent(item["agent"], o, "agent");
      ie.neighbor = rd.agent(item["neighbor"], o, "neighbor");
      ie.value = rd.point(item["value"], "estimate value");
      if (c.graph.find_edge(ie.agent, ie.neighbor) < 0) {
        rd.fail(item, "agents " + std::to_string(ie.agent + 1) + " and " +
                          std::to_string(ie.neighbor + 1) + " share no edge");
      }
      c.initial_estimates.push_back(ie);
    }
  }
}

void read_noise(const Reader& rd, const YAML::Node& sec, ScenarioConfig& c) {
  rd.expect_map(sec, "noise",
                {"process_position_psd", "process_heading_psd", "meas_distance_var",
                 "meas_heading_var", "inject"});
  set_if(rd, sec, "process_position_psd", c.noise.process_position_psd);
  set_if(rd, sec, "process_heading_psd", c.noise.process_heading_psd);
  set_if(rd, sec, "meas_distance_var", c.noise.meas_distance_var);
  set_if(rd, sec, "meas_heading_var", c.noise.meas_heading_var);
  if (const YAML::Node n = sec["inject"]) c.inject_noise = rd.as<bool>(n, "inject");
}

void read_thresholds(const Reader& rd, const YAML::Node& sec, ScenarioConfig& c) {
  rd.expect_map(sec, "thresholds", {"tol_d", "tol_e", "tol_v", "tol_c", "window_fraction"});
  set_if(rd, sec, "tol_d", c.thresholds.tol_d);
  set_if(rd, sec, "tol_e", c.thresholds.tol_e);
  set_if(rd, sec, "tol_v", c.thresholds.tol_v);
  set_if(rd, sec, "tol_c", c.thresholds.tol_c);
  set_if(rd, sec, "window_fraction", c.thresholds.window_fraction);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    rd.fail(e.mark.line + 1, e.msg);
  }
  if (!root || root.IsNull()) rd.fail(1, "empty config");
  rd.expect_map(root, "config",
                {"scenario", "graph", "initial", "noise", "thresholds", "manifest"});

  ScenarioConfig c;
  const YAML::Node scenario = root["scenario"];
  if (scenario && scenario.IsMap()) {
    if (const YAML::Node p = scenario["preset"]) {
      const std::string name = rd.as<std::string>(p, "preset");
      const auto preset = scenario_by_name(name);
      if (!preset) rd.fail(p, "unknown preset '" + name + "'");
      c = *preset;
    }
  }
  if (scenario) read_scenario(rd, scenario, c);
  if (const YAML::Node n = root["graph"]) read_graph(rd, n, c);
  if (const YAML::Node n = root["initial"]) read_initial(rd, n, c);
  if (const YAML::Node n = root["noise"]) read_noise(rd, n, c);
  if (const YAML::Node n = root["thresholds"]) read_thresholds(rd, n, c);

  try {
    c.validate();
  } catch (const DomainError& e) {
    rd.fail(root, e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

namespace {

void emit_point(YAML::Emitter& out, const Eigen::Vector2d& p) {
  out << YAML::Flow << YAML::BeginSeq << format_double(p.x()) << format_double(p.y())
      << YAML::EndSeq;
}

void emit_numbers(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << format_double(x);
  out << YAML::EndSeq;
}

void emit_config(YAML::Emitter& out, const ScenarioConfig& c) {
  out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "variant" << YAML::Value << to_string(c.variant);
  out << YAML::Key << "sharing" << YAML::Value << to_string(c.sharing);
  out << YAML::Key << "seed" << YAML::Value << std::to_string(c.seed);
  out << YAML::Key << "dt" << YAML::Value << format_double(c.dt);
  out << YAML::Key << "duration" << YAML::Value << format_double(c.duration);
  out << YAML::Key << "stiffness_limit" << YAML::Value << format_double(c.stiffness_limit);
  out << YAML::Key << "expected_outcome" << YAML::Value
      << (c.expected_outcome ? to_string(*c.expected_outcome) : std::string("none"));
  out << YAML::EndMap;

  out << YAML::Key << "graph" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "agents" << YAML::Value << c.graph.agent_count();
  out << YAML::Key << "edges" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const Edge& e : c.graph.edges()) {
    out << YAML::Flow << YAML::BeginSeq << e.tail + 1 << e.head + 1 << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "distances" << YAML::Value;
  emit_numbers(out, c.distances.values());
  out << YAML::Key << "mismatch" << YAML::Value;
  emit_numbers(out, c.mismatch.a);
  out << YAML::EndMap;

  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "positions" << YAML::Value;
  if (c.initial_positions) {
    out << YAML::BeginSeq;
    for (int i = 0; i < c.graph.agent_count(); ++i) {
      emit_point(out, c.initial_positions->segment<2>(2 * i));
    }
    out << YAML::EndSeq;
  } else {
    out << "random";
  }
  out << YAML::Key << "spread_box" << YAML::Value << format_double(c.spread_box);
  out << YAML::Key << "min_separation" << YAML::Value << format_double(c.min_separation);
  out << YAML::Key << "headings" << YAML::Value;
  emit_numbers(out, std::vector<double>(c.headings.data(), c.headings.data() + c.headings.size()));
  out << YAML::Key << "offset_bound" << YAML::Value << format_double(c.offset_bound);
  out << YAML::Key << "position_var" << YAML::Value << format_double(c.initial_position_var);
  out << YAML::Key << "heading_var" << YAML::Value << format_double(c.initial_heading_var);
  out << YAML::Key << "estimates" << YAML::Value << YAML::BeginSeq;
  for (const InitialEstimate& ie : c.initial_estimates) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "agent" << YAML::Value << ie.agent + 1;
    out << YAML::Key << "neighbor" << YAML::Value << ie.neighbor + 1;
    out << YAML::Key << "value" << YAML::Value;
    emit_point(out, ie.value);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "process_position_psd" << YAML::Value
      << format_double(c.noise.process_position_psd);
  out << YAML::Key << "process_heading_psd" << YAML::Value
      << format_double(c.noise.process_heading_psd);
  out << YAML::Key << "meas_distance_var" << YAML::Value
      << format_double(c.noise.meas_distance_var);
  out << YAML::Key << "meas_heading_var" << YAML::Value << format_double(c.noise.meas_heading_var);
  out << YAML::Key << "inject" << YAML::Value << c.inject_noise;
  out << YAML::EndMap;

  const OutcomeThresholds& t = c.thresholds;
  out << YAML::Key << "thresholds" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tol_d" << YAML::Value << format_double(t.tol_d);
  out << YAML::Key << "tol_e" << YAML::Value << format_double(t.tol_e);
  out << YAML::Key << "tol_v" << YAML::Value << format_double(t.tol_v);
  out << YAML::Key << "tol_c" << YAML::Value << format_double(t.tol_c);
  out << YAML::Key << "window_fraction" << YAML::Value << format_double(t.window_fraction);
  out << YAML::EndMap;
}

}  // namespace

std::string write_config(const ScenarioConfig& config) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  emit_config(out, config);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string write_manifest(const RunManifest& m) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  emit_config(out, m.config);
  out << YAML::Key << "manifest" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "version" << YAML::Value << m.version;
  out << YAML::Key << "seed" << YAML::Value << std::to_string(m.config.seed);
  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  for (const auto& [role, path] : m.outputs) out << YAML::Key << role << YAML::Value << path;
  out << YAML::EndMap;
  out << YAML::Key << "outcome" << YAML::Value << to_string(m.outcome);
  if (m.config.expected_outcome) {
    out << YAML::Key << "matches_expected" << YAML::Value
        << (m.outcome == *m.config.expected_outcome);
  }
  out << YAML::Key << "summary" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "max_distance_error" << YAML::Value
      << format_double(m.summary.max_distance_error);
  out << YAML::Key << "max_estimation_error" << YAML::Value
      << format_double(m.summary.max_estimation_error);
  out << YAML::Key << "min_abs_angular_rate" << YAML::Value
      << format_double(m.summary.min_abs_angular_rate);
  out << YAML::Key << "min_centroid_speed" << YAML::Value
      << format_double(m.summary.min_centroid_speed);
  out << YAML::Key << "max_agent_speed" << YAML::Value << format_double(m.summary.max_agent_speed);
  out << YAML::Key << "singular_updates" << YAML::Value << m.singular_updates;
  out << YAML::EndMap;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<std::string> metrics_header(const MetricsSeries& series) {
  std::vector<std::string> cols{"t"};
  for (const std::string& l : series.edge_labels) cols.push_back("dist_" + l);
  for (const std::string& l : series.edge_labels) cols.push_back("esterr_" + l);
  cols.push_back("centroid_speed");
  cols.push_back("angular_rate");
  return cols;
}

void write_metrics_csv(std::ostream& out, const MetricsSeries& series) {
  std::string text;
  const std::vector<std::string> header = metrics_header(series);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text += ',';
    text += header[i];
  }
  text += '\n';

  auto field = [&](double v, double t) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("non-finite metric at t = " + format_double(t));
    }
    text += ',';
    text += format_double(v);
  };
  for (const MetricsRecord& rec : series.records) {
    text += format_double(rec.t);
    for (double d : rec.distance) field(d, rec.t);
    for (double e : rec.estimate_error) field(e, rec.t);
    field(rec.centroid_speed, rec.t);
    field(rec.angular_rate, rec.t);
    text += '\n';
  }
  out << text;
}

}  // namespace relloc
