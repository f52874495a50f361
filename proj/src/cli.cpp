#include "relloc/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "relloc/config_io.hpp"

namespace relloc {

std::filesystem::path resolve_out_dir(const std::optional<std::filesystem::path>& out) {
  if (out) return *out;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return "relloc_out";
}

std::vector<TrajectorySample> read_trajectory_csv(const std::filesystem::path& path, double& dt) {
  std::ifstream in(path);
  const std::string source = path.string();
  if (!in) throw ConfigError(source, 0, "cannot open trajectory file");

  std::vector<double> times;
  std::vector<TrajectorySample> samples;
  std::string line;
  int line_no = 0;
  int columns = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (columns < 0 && std::isalpha(static_cast<unsigned char>(line[0]))) continue;

    std::vector<double> row;
    std::stringstream ss(line);
    ss.imbue(std::locale::classic());
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::istringstream cs(cell);
      cs.imbue(std::locale::classic());
      double v = 0.0;
      if (!(cs >> v) || !(cs >> std::ws).eof() || !std::isfinite(v)) {
        throw ConfigError(source, line_no, "not a finite number: '" + cell + "'");
      }
      row.push_back(v);
    }
    if (columns < 0) {
      columns = static_cast<int>(row.size());
      if (columns < 7 || (columns - 3) % 4 != 0) {
        throw ConfigError(source, line_no,
                          "expected 4n + 3 columns (t, state, input), got " +
                              std::to_string(columns));
      }
    } else if (static_cast<int>(row.size()) != columns) {
      throw ConfigError(source, line_no, "row has " + std::to_string(row.size()) +
                                             " columns, expected " + std::to_string(columns));
    }
    const int n = (columns - 3) / 4;
    const Eigen::Map<const Eigen::VectorXd> v(row.data(), columns);
    times.push_back(v(0));
    samples.push_back({GroupElement(v.segment(1, 2 * n), v(2 * n + 1)),
                       AlgebraElement(v.segment(2 * n + 2, 2 * n), v(columns - 1))});
  }
  if (samples.size() < 2) throw ConfigError(source, line_no, "need at least two samples");
  dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ConfigError(source, 0, "time must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(times[i]))) {
      throw ConfigError(source, 0, "time step is not uniform at sample " + std::to_string(i + 1));
    }
  }
  return samples;
}

namespace {

void print_values(std::ostream& out, const char* label, const double* v, std::size_t count) {
  out << label;
  for (std::size_t i = 0; i < count; ++i) out << ' ' << format_double(v[i]);
  out << '\n';
}

int execute(const ScenarioConfig& config, const std::filesystem::path& dir, std::ostream& out,
            Outcome& outcome) {
  const MetricsSeries series = run(config);
  outcome = detect_outcome(series, config.thresholds);

  std::filesystem::create_directories(dir);
  const std::filesystem::path metrics_path = dir / "metrics.csv";
  const std::filesystem::path manifest_path = dir / "manifest.yaml";

  std::ostringstream csv;
  write_metrics_csv(csv, series);
  std::ofstream(metrics_path, std::ios::binary) << csv.str();

  RunManifest manifest{config, kArtifactVersion, {}, outcome, summarize(series, config.thresholds),
                       series.singular_updates};
  manifest.outputs = {{"metrics", metrics_path.string()}, {"manifest", manifest_path.string()}};
  std::ofstream(manifest_path, std::ios::binary) << write_manifest(manifest);

  out << "outcome " << to_string(outcome) << '\n';
  out << "metrics " << metrics_path.string() << '\n';
  out << "manifest " << manifest_path.string() << '\n';
  return kExitOk;
}

// Maps the exception families onto the exit-code contract.
template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig config;
    if (options.config && options.scenario) {
      throw DomainError("give either --config or --scenario, not both");
    }
    if (options.config) {
      config = load_config(*options.config);
    } else if (options.scenario) {
      const auto preset = scenario_by_name(*options.scenario);
      if (!preset) throw DomainError("unknown scenario '" + *options.scenario + "'");
      config = *preset;
    } else {
      throw DomainError("run needs --config or --scenario");
    }
    if (options.seed) config.seed = *options.seed;
    if (options.dt) config.dt = *options.dt;
    if (options.duration) config.duration = *options.duration;
    config.validate();

    Outcome outcome;
    return execute(config, resolve_out_dir(options.out), out, outcome);
  });
}

int cmd_reproduce(const std::string& name, const std::optional<std::filesystem::path>& out_dir,
                  std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto preset = scenario_by_name(name);
    if (!preset) throw DomainError("unknown preset '" + name + "'");
    Outcome outcome;
    execute(*preset, resolve_out_dir(out_dir) / name, out, outcome);
    const Outcome expected = *preset->expected_outcome;
    if (outcome != expected) {
      err << "expected " << to_string(expected) << ", got " << to_string(outcome) << '\n';
      return static_cast<int>(kExitRuntime);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_check_observability(const ObservabilityOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.trajectory) {
      double dt = 0.0;
      const std::vector<TrajectorySample> samples = read_trajectory_csv(*o.trajectory, dt);
      const GramianReport g = empirical_gramian(samples, dt, o.gramian_tol);
      const int dim = samples.front().state.dim();
      const Eigen::VectorXd lambda =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g.gramian, Eigen::EigenvaluesOnly)
              .eigenvalues()
              .reverse();
      out << "samples " << samples.size() << '\n';
      out << "dt " << format_double(dt) << '\n';
      out << "dim " << dim << '\n';
      out << "gramian_rank " << g.rank << '\n';
      print_values(out, "gramian_eigenvalues", lambda.data(), lambda.size());
      out << "deficient_neighbors";
      for (int k : g.deficient_neighbor_blocks) out << ' ' << k + 1;
      out << '\n';
      const bool observable = g.rank == dim && g.deficient_neighbor_blocks.empty();
      out << "observable " << (observable ? "yes" : "no") << '\n';
      return static_cast<int>(observable ? kExitOk : kExitRankDeficient);
    }

    Eigen::VectorXd p;
    double theta = o.theta;
    if (!o.p.empty()) {
      if (o.p.size() % 2 != 0) throw DomainError("--p needs an even number of values");
      if (o.n && *o.n * 2 != static_cast<int>(o.p.size())) {
        throw DomainError("--p lists " + std::to_string(o.p.size()) + " values for n = " +
                          std::to_string(*o.n));
      }
      p = Eigen::Map<const Eigen::VectorXd>(o.p.data(), static_cast<Eigen::Index>(o.p.size()));
    } else {
      if (!o.n) throw DomainError("check-observability needs --n, --p or --trajectory");
      if (*o.n < 1) throw DomainError("n must be at least 1");
      std::mt19937_64 rng(o.random_seed.value_or(1));
      std::uniform_real_distribution<double> coord(-10.0, 10.0);
      std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
      p.resize(2 * *o.n);
      for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = coord(rng);
      theta = angle(rng);
    }
    const GroupElement q(p, theta);
    const CodistributionReport r = codistribution_rank(q, o.tol, o.depth);
    out << "n " << q.n() << '\n';
    print_values(out, "p", q.p().data(), q.p().size());
    out << "theta " << format_double(q.theta()) << '\n';
    out << "dim " << q.dim() << '\n';
    out << "rank " << r.rank << '\n';
    print_values(out, "singular_values", r.singular_values.data(), r.singular_values.size());
    out << "observable " << (r.observable ? "yes" : "no") << '\n';
    return static_cast<int>(r.observable ? kExitOk : kExitRankDeficient);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relative localization and distance-based formation control simulator"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::string out_dir;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario and write metrics.csv and a manifest");
  auto* config_opt = run_cmd->add_option("--config", run_opts.config, "Scenario YAML file");
  auto* scenario_opt = run_cmd->add_option("--scenario", run_opts.scenario,
                                           "Preset: nominal, issue1, issue2, issue3");
  config_opt->excludes(scenario_opt);
  run_cmd->add_option("--seed", run_opts.seed, "Override the seed");
  run_cmd->add_option("--dt", run_opts.dt, "Override the time step");
  run_cmd->add_option("--duration", run_opts.duration, "Override the simulated time");
  run_cmd->add_option("--out", run_opts.out,
                      std::string("Output directory (default $") + kOutDirEnv + " or relloc_out)");

  ObservabilityOptions obs;
  CLI::App* obs_cmd = app.add_subcommand(
      "check-observability", "Rank of the codistribution at a state, or Gramian of a trajectory");
  obs_cmd->add_option("--n", obs.n, "Number of neighbors");
  obs_cmd->add_option("--p", obs.p, "Relative positions x1,y1,...,xn,yn")->delimiter(',');
  obs_cmd->add_option("--theta", obs.theta, "Heading");
  obs_cmd->add_option("--random", obs.random_seed, "Seed for a random state");
  obs_cmd->add_option("--trajectory", obs.trajectory, "Trajectory CSV for the Gramian check");
  obs_cmd->add_option("--tol", obs.tol, "Relative singular value tolerance");
  obs_cmd->add_option("--gramian-tol", obs.gramian_tol, "Relative eigenvalue tolerance");
  obs_cmd->add_option("--depth", obs.depth, "Order of Lie derivatives");

  std::string preset;
  std::optional<std::filesystem::path> reproduce_out;
  CLI::App* rep_cmd = app.add_subcommand("reproduce", "Run a preset and compare with its expected outcome");
  rep_cmd->add_option("name", preset, "nominal, issue1, issue2 or issue3")->required();
  rep_cmd->add_option("--out", reproduce_out, "Output root; files go to <out>/<name>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (run_cmd->parsed()) return cmd_run(run_opts, out, err);
  if (obs_cmd->parsed()) return cmd_check_observability(obs, out, err);
  return cmd_reproduce(preset, reproduce_out, out, err);
}

}  // namespace relloc
