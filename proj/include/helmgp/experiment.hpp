#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "helmgp/drifters.hpp"
#include "helmgp/fields.hpp"
#include "helmgp/grid_io.hpp"
#include "helmgp/hyperopt.hpp"

namespace helmgp {

enum class FamilySelection { Helmholtz, Velocity, Both };

struct OptimizerSettings {
  double lr = 0.01;
  int max_iters = 2000;
  double tol = 1e-4;
};

struct SimSource {
  AnalyticField::Kind kind = AnalyticField::Kind::Vortex;
  double b = 0.5;               // bump width (div_bump, duffing)
  double boundary = 0.5;        // vortex/current split (vortex_current)
  double current_speed = 0.7;
  SimGrid grid;
  // Buoy release groups; each group has its own horizon and cadence.
  std::vector<BuoyConfig> groups;

  AnalyticField field() const {
    switch (kind) {
      case AnalyticField::Kind::Vortex:
        return AnalyticField::vortex();
      case AnalyticField::Kind::VortexWithCurrent:
        return AnalyticField::vortex_with_current(boundary, current_speed);
      case AnalyticField::Kind::DivergenceBump:
        return AnalyticField::divergence_bump(b);
      case AnalyticField::Kind::DuffingWithBumps:
        return AnalyticField::duffing_with_bumps(b);
    }
    throw ConfigError("SimSource: unknown simulation kind");
  }
};

struct IngestSource {
  std::string path;
  ColumnSchema schema;
  IngestFilter filter;
};

struct ExperimentConfig {
  FamilySelection families = FamilySelection::Both;
  // Initial hyperparameters: sigma1/sigma2 are signal standard deviations of
  // the two component kernels (potential/stream or u/v), noise is the
  // observation-noise variance.
  double ell1 = 1.0;
  double sigma1 = 1.0;
  double ell2 = 2.7;
  double sigma2 = 0.369;
  double noise = 0.135;
  bool pinned = false;
  std::variant<SimSource, IngestSource> source;
  SimGrid test_grid;
  OptimizerSettings opt;
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  PriorSpec init_spec(PriorFamily family) const {
    PriorSpec s{family, ell1, sigma1 * sigma1, ell2, sigma2 * sigma2, noise};
    s.validate();
    return s;
  }

  std::vector<PriorFamily> arms() const {
    switch (families) {
      case FamilySelection::Helmholtz: return {PriorFamily::Helmholtz};
      case FamilySelection::Velocity: return {PriorFamily::Velocity};
      case FamilySelection::Both:
        return {PriorFamily::Helmholtz, PriorFamily::Velocity};
    }
    throw ConfigError("ExperimentConfig: bad family selection");
  }
};

// ---------------------------------------------------------------------------
// Flat key = value config files ('#' starts a comment).

namespace detail {

class KeyValueFile {
 public:
  explicit KeyValueFile(std::istream& in) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty key");
      kv_[key] = value;
    }
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end())
      throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& dflt) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const { return to_double(key, get(key)); }

  double get_double_or(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }

  int get_int_or(const std::string& key, int dflt) const {
    return has(key) ? static_cast<int>(get_double(key)) : dflt;
  }

  bool get_bool_or(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: key '" + key + "' is not a boolean: " + v);
  }

  Vec2 get_vec2(const std::string& key) const {
    const auto parts = split(get(key), ',');
    if (parts.size() != 2)
      throw ConfigError("config: key '" + key + "' needs two comma-separated values");
    return {to_double(key, parts[0]), to_double(key, parts[1])};
  }

  std::vector<Vec2> get_point_list(const std::string& key) const {
    std::vector<Vec2> out;
    for (const std::string& item : split(get(key), ';')) {
      const auto parts = split(item, ',');
      if (parts.size() != 2)
        throw ConfigError("config: key '" + key +
                          "': each point needs two coordinates");
      out.emplace_back(to_double(key, parts[0]), to_double(key, parts[1]));
    }
    if (out.empty())
      throw ConfigError("config: key '" + key + "' lists no points");
    return out;
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

 private:
  static std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, delim)) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  static double to_double(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
      throw ConfigError("config: key '" + key + "' is not numeric: " + s);
    return v;
  }

  std::map<std::string, std::string> kv_;
};

inline SimGrid parse_grid(const KeyValueFile& kv, const std::string& prefix) {
  SimGrid g;
  g.min = kv.get_vec2(prefix + ".min");
  g.max = kv.get_vec2(prefix + ".max");
  const Vec2 res = kv.get_vec2(prefix + ".res");
  g.nx = static_cast<int>(res[0]);
  g.ny = static_cast<int>(res[1]);
  g.validate();
  return g;
}

inline AnalyticField::Kind parse_kind(const std::string& s) {
  if (s == "vortex") return AnalyticField::Kind::Vortex;
  if (s == "vortex_current") return AnalyticField::Kind::VortexWithCurrent;
  if (s == "div_bump") return AnalyticField::Kind::DivergenceBump;
  if (s == "duffing") return AnalyticField::Kind::DuffingWithBumps;
  throw ConfigError("config: unknown sim.kind '" + s + "'");
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(std::istream& in) {
  detail::KeyValueFile kv(in);
  ExperimentConfig cfg;

  const std::string fam = kv.get_or("prior.family", "both");
  if (fam == "helmholtz")
    cfg.families = FamilySelection::Helmholtz;
  else if (fam == "velocity")
    cfg.families = FamilySelection::Velocity;
  else if (fam == "both")
    cfg.families = FamilySelection::Both;
  else
    throw ConfigError("config: unknown prior.family '" + fam + "'");

  cfg.ell1 = kv.get_double_or("prior.ell1", cfg.ell1);
  cfg.sigma1 = kv.get_double_or("prior.sigma1", cfg.sigma1);
  cfg.ell2 = kv.get_double_or("prior.ell2", cfg.ell2);
  cfg.sigma2 = kv.get_double_or("prior.sigma2", cfg.sigma2);
  cfg.noise = kv.get_double_or("prior.noise", cfg.noise);
  cfg.pinned = kv.get_bool_or("prior.pinned", false);

  const std::string source = kv.get_or("data.source", "simulate");
  if (source == "simulate") {
    SimSource sim;
    sim.kind = detail::parse_kind(kv.get("sim.kind"));
    sim.b = kv.get_double_or("sim.b", sim.b);
    sim.boundary = kv.get_double_or("sim.boundary", sim.boundary);
    sim.current_speed = kv.get_double_or("sim.current_speed", sim.current_speed);
    sim.grid = detail::parse_grid(kv, "sim.grid");
    // primary release group, plus an optional second one (suffix 2) for
    // experiments that observe some buoys at a different cadence
    for (const std::string suffix : {"", "2"}) {
      const std::string key = "sim.buoys" + suffix;
      if (!suffix.empty() && !kv.has(key)) continue;
      BuoyConfig group;
      group.starts = kv.get_point_list(key);
      group.total_time = kv.get_double("sim.total_time" + suffix);
      group.steps = kv.get_int_or("sim.steps" + suffix, 1);
      group.dt = kv.get_double_or("sim.dt" + suffix, 0.0);
      sim.groups.push_back(std::move(group));
    }
    cfg.source = sim;
  } else if (source == "ingest") {
    IngestSource ing;
    ing.path = kv.get("ingest.path");
    ing.schema.id = kv.get_or("ingest.col.id", ing.schema.id);
    ing.schema.time = kv.get_or("ingest.col.time", ing.schema.time);
    ing.schema.lat = kv.get_or("ingest.col.lat", ing.schema.lat);
    ing.schema.lon = kv.get_or("ingest.col.lon", ing.schema.lon);
    ing.schema.u = kv.get_or("ingest.col.u", ing.schema.u);
    ing.schema.v = kv.get_or("ingest.col.v", ing.schema.v);
    ing.filter.downsample = kv.get_int_or("ingest.downsample", 1);
    if (kv.has("ingest.box.min")) {
      BoundingBox box{kv.get_vec2("ingest.box.min"), kv.get_vec2("ingest.box.max")};
      ing.filter.box = box;
    }
    if (kv.has("ingest.time_window")) {
      const Vec2 w = kv.get_vec2("ingest.time_window");
      ing.filter.time_window = {w[0], w[1]};
    }
    ing.filter.validate();
    cfg.source = ing;
  } else {
    throw ConfigError("config: unknown data.source '" + source + "'");
  }

  cfg.test_grid = detail::parse_grid(kv, "test_grid");
  cfg.opt.lr = kv.get_double_or("opt.lr", cfg.opt.lr);
  cfg.opt.max_iters = kv.get_int_or("opt.max_iters", cfg.opt.max_iters);
  cfg.opt.tol = kv.get_double_or("opt.tol", cfg.opt.tol);
  cfg.out_dir = kv.get_or("out.dir", cfg.out_dir);
  cfg.seed = static_cast<std::uint64_t>(kv.get_double_or("seed", 0.0));
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_experiment_config(in);
}

// ---------------------------------------------------------------------------
// Run pipeline.

struct ArmResult {
  PriorFamily family = PriorFamily::Helmholtz;
  PriorSpec fitted{PriorFamily::Helmholtz, 1, 1, 1, 1, 1};
  std::vector<double> lml_trace;
  bool converged = true;
  int iterations = 0;
  std::optional<double> rmse_velocity;
  std::optional<double> rmse_divergence;
  std::optional<double> rmse_vorticity;
  std::string grid_file;   // relative to the output directory
  std::string trace_file;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct RunReport {
  std::string out_dir;
  std::string dataset_file = "dataset.csv";
  std::string report_file = "report.txt";
  std::size_t observations = 0;
  std::vector<ArmResult> arms;
  double total_seconds = 0.0;
};

namespace detail {

inline VelocityDataset acquire_data(const ExperimentConfig& cfg) {
  if (std::holds_alternative<SimSource>(cfg.source)) {
    const SimSource& sim = std::get<SimSource>(cfg.source);
    if (sim.groups.empty())
      throw ConfigError("sim source: no buoy release groups");
    VelocityDataset data;
    for (const BuoyConfig& group : sim.groups) {
      const VelocityDataset part = simulate_buoys(sim.field(), sim.grid, group);
      data.locations.insert(data.locations.end(), part.locations.begin(),
                            part.locations.end());
      data.velocities.insert(data.velocities.end(), part.velocities.begin(),
                             part.velocities.end());
    }
    return data;
  }
  const IngestSource& ing = std::get<IngestSource>(cfg.source);
  const IngestResult parsed = read_drifters_file(ing.path, ing.schema);
  return apply_filter(parsed.records, ing.filter);
}

inline std::optional<TruthGrid> truth_on_grid(const ExperimentConfig& cfg) {
  if (!std::holds_alternative<SimSource>(cfg.source)) return std::nullopt;
  const AnalyticField field = std::get<SimSource>(cfg.source).field();
  TruthGrid truth;
  for (const Vec2& x : cfg.test_grid.points()) {
    const FieldSample s = field(x);
    truth.u.push_back(s.velocity[0]);
    truth.v.push_back(s.velocity[1]);
    truth.divergence.push_back(s.divergence);
    truth.vorticity.push_back(s.vorticity);
  }
  return truth;
}

inline void write_trace_csv(const std::string& path,
                            const std::vector<double>& trace) {
  std::ofstream os(path);
  if (!os) throw DataError("write_trace_csv: cannot open '" + path + "'");
  os << "iter,lml\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    os << i << ',' << fmt17(trace[i]) << "\n";
}

inline void write_report(const std::string& path, const ExperimentConfig& cfg,
                         const RunReport& report) {
  std::ofstream os(path);
  if (!os) throw DataError("write_report: cannot open '" + path + "'");
  os << "data.source: "
     << (std::holds_alternative<SimSource>(cfg.source) ? "simulate" : "ingest")
     << "\n";
  os << "data.observations: " << report.observations << "\n";
  os << "data.file: " << report.dataset_file << "\n";
  os << "seed: " << cfg.seed << "\n";
  for (const ArmResult& arm : report.arms) {
    const std::string p = std::string("arm.") + family_name(arm.family) + ".";
    os << p << "pinned: " << (cfg.pinned ? "true" : "false") << "\n";
    os << p << "converged: " << (arm.converged ? "true" : "false") << "\n";
    os << p << "iterations: " << arm.iterations << "\n";
    os << p << "lml: " << fmt17(arm.lml_trace.back()) << "\n";
    os << p << "ell1: " << fmt17(arm.fitted.ell1) << "\n";
    os << p << "sigma2_1: " << fmt17(arm.fitted.sigma2_1) << "\n";
    os << p << "ell2: " << fmt17(arm.fitted.ell2) << "\n";
    os << p << "sigma2_2: " << fmt17(arm.fitted.sigma2_2) << "\n";
    os << p << "sigma2_obs: " << fmt17(arm.fitted.sigma2_obs) << "\n";
    if (arm.rmse_velocity)
      os << p << "rmse_velocity: " << fmt17(*arm.rmse_velocity) << "\n";
    if (arm.rmse_divergence)
      os << p << "rmse_divergence: " << fmt17(*arm.rmse_divergence) << "\n";
    if (arm.rmse_vorticity)
      os << p << "rmse_vorticity: " << fmt17(*arm.rmse_vorticity) << "\n";
    os << p << "grid: " << arm.grid_file << "\n";
    os << p << "trace: " << arm.trace_file << "\n";
  }
  if (!os) throw DataError("write_report: write failed for '" + path + "'");
}

class OutputTracker {
 public:
  explicit OutputTracker(const std::string& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
  }

  std::string path(const std::string& name) {
    written_.push_back((dir_ / name).string());
    return written_.back();
  }

  void commit() { written_.clear(); }

  ~OutputTracker() {
    // a failed run leaves no partial outputs behind
    for (const std::string& p : written_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

}  // namespace detail

/// Builds the training dataset from the configured source (simulation
/// groups or drifter ingest).
inline VelocityDataset acquire_data(const ExperimentConfig& cfg) {
  return detail::acquire_data(cfg);
}

/// Analytic ground truth on the test grid; empty for ingest sources.
inline std::optional<TruthGrid> truth_on_grid(const ExperimentConfig& cfg) {
  return detail::truth_on_grid(cfg);
}

/// Full pipeline: acquire data, fit per prior family (unless pinned),
/// predict velocity/divergence/vorticity on the test grid, compute RMSEs
/// against the analytic truth when the source is a simulation, and emit the
/// dataset, per-arm grid and trace files, and the report.
///
/// Deterministic for a fixed config: both arms share the single acquired
/// dataset, and no output file contains wall-clock values (timings live only
/// in the returned report).
inline RunReport run_experiment(const ExperimentConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto seconds_since = [](clock::time_point start) {
    return std::chrono::duration<double>(clock::now() - start).count();
  };

  cfg.test_grid.validate();
  RunReport report;
  report.out_dir = cfg.out_dir;
  detail::OutputTracker out(cfg.out_dir);

  const VelocityDataset data = detail::acquire_data(cfg);
  data.validate();
  report.observations = data.size();

  const std::optional<TruthGrid> truth = detail::truth_on_grid(cfg);
  const std::vector<Vec2> grid_points = cfg.test_grid.points();

  write_dataset_csv(out.path(report.dataset_file), data);

  for (PriorFamily family : cfg.arms()) {
    ArmResult arm;
    arm.family = family;

    const auto t_fit = clock::now();
    const PriorSpec init = cfg.init_spec(family);
    if (cfg.pinned) {
      arm.fitted = init;
      arm.lml_trace = {log_marginal_likelihood(init, data)};
      arm.iterations = 0;
      arm.converged = true;
    } else {
      FitConfig fit_cfg;
      fit_cfg.adam.lr = cfg.opt.lr;
      fit_cfg.max_iters = cfg.opt.max_iters;
      fit_cfg.tol = cfg.opt.tol;
      const FitResult fitres = fit(init.to_log(), family, data, fit_cfg);
      arm.fitted = fitres.spec;
      arm.lml_trace = fitres.lml_trace;
      arm.iterations = fitres.iterations;
      arm.converged = fitres.converged;
    }
    arm.fit_seconds = seconds_since(t_fit);

    const auto t_pred = clock::now();
    const FieldPosterior post = predict(arm.fitted, data, grid_points,
                                        /*divergence=*/true, /*vorticity=*/true);
    arm.predict_seconds = seconds_since(t_pred);

    if (truth) {
      std::vector<Vec2> pred_vel(grid_points.size());
      std::vector<Vec2> truth_vel(grid_points.size());
      for (std::size_t i = 0; i < grid_points.size(); ++i) {
        pred_vel[i] = Vec2(post.mean_u[i], post.mean_v[i]);
        truth_vel[i] = Vec2(truth->u[i], truth->v[i]);
      }
      arm.rmse_velocity = rmse(truth_vel, pred_vel);
      arm.rmse_divergence = rmse(truth->divergence, post.mean_div);
      arm.rmse_vorticity = rmse(truth->vorticity, post.mean_vort);
    }

    arm.grid_file = std::string(family_name(family)) + "_grid.csv";
    arm.trace_file = std::string(family_name(family)) + "_lml_trace.csv";
    write_grid_csv(out.path(arm.grid_file), post, truth);
    detail::write_trace_csv(out.path(arm.trace_file), arm.lml_trace);
    report.arms.push_back(std::move(arm));
  }

  detail::write_report(out.path(report.report_file), cfg, report);
  out.commit();
  report.total_seconds = seconds_since(t0);
  return report;
}

}  // namespace helmgp
