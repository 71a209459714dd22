// Command-line front end: simulate experiments, fit hyperparameters, predict
// fields on grids, ingest drifter files, and run the full pipeline.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "helmgp/helmgp.hpp"

namespace {

using namespace helmgp;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string family;
  bool pin = false;
  std::string data_path;
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_data = false) {
  sub->add_option("--config", o.config_path, "Experiment config file")
      ->required();
  sub->add_option("--out", o.out_dir, "Output directory (overrides out.dir)");
  sub->add_option("--family", o.family, "Restrict to one prior family")
      ->check(CLI::IsMember({"helmholtz", "velocity"}));
  sub->add_flag("--pin-hyperparams", o.pin,
                "Skip fitting; use the configured hyperparameters as-is");
  if (with_data)
    sub->add_option("--data", o.data_path,
                    "Dataset CSV to use instead of the configured source");
}

ExperimentConfig load(const CommonOpts& o) {
  ExperimentConfig cfg = load_experiment_config(o.config_path);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.family == "helmholtz") cfg.families = FamilySelection::Helmholtz;
  if (o.family == "velocity") cfg.families = FamilySelection::Velocity;
  if (o.pin) cfg.pinned = true;
  return cfg;
}

VelocityDataset dataset_for(const ExperimentConfig& cfg, const CommonOpts& o) {
  if (!o.data_path.empty()) return read_dataset_csv_file(o.data_path);
  return acquire_data(cfg);
}

std::string out_file(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

int cmd_run(const CommonOpts& o) {
  const ExperimentConfig cfg = load(o);
  const RunReport report = run_experiment(cfg);
  std::printf("observations: %zu\n", report.observations);
  for (const ArmResult& arm : report.arms) {
    std::printf("[%s] converged=%s iterations=%d lml=%.6f fit=%.2fs predict=%.2fs\n",
                family_name(arm.family), arm.converged ? "yes" : "no",
                arm.iterations, arm.lml_trace.back(), arm.fit_seconds,
                arm.predict_seconds);
    if (arm.rmse_velocity)
      std::printf("[%s] rmse velocity=%.4f divergence=%.4f vorticity=%.4f\n",
                  family_name(arm.family), *arm.rmse_velocity,
                  *arm.rmse_divergence, *arm.rmse_vorticity);
  }
  std::printf("report: %s/%s (total %.2fs)\n", report.out_dir.c_str(),
              report.report_file.c_str(), report.total_seconds);
  return 0;
}

int cmd_simulate(const CommonOpts& o) {
  const ExperimentConfig cfg = load(o);
  if (!std::holds_alternative<SimSource>(cfg.source))
    throw ConfigError("simulate: config data.source is not a simulation");
  const VelocityDataset data = acquire_data(cfg);
  const std::string path = out_file(cfg, "dataset.csv");
  write_dataset_csv(path, data);
  std::printf("wrote %zu observations to %s\n", data.size(), path.c_str());
  return 0;
}

int cmd_ingest(const CommonOpts& o) {
  const ExperimentConfig cfg = load(o);
  if (!std::holds_alternative<IngestSource>(cfg.source))
    throw ConfigError("ingest: config data.source is not an ingest source");
  const IngestSource& ing = std::get<IngestSource>(cfg.source);
  const IngestResult parsed = read_drifters_file(ing.path, ing.schema);
  const VelocityDataset data = apply_filter(parsed.records, ing.filter);

  const std::string path = out_file(cfg, "dataset.csv");
  write_dataset_csv(path, data);
  const std::string rejects = out_file(cfg, "rejects.txt");
  {
    std::ofstream os(rejects);
    for (const auto& [line, reason] : parsed.rejects)
      os << "line " << line << ": " << reason << "\n";
  }
  std::printf("parsed %zu records (%zu rejected), kept %zu -> %s\n",
              parsed.records.size(), parsed.rejects.size(), data.size(),
              path.c_str());
  return 0;
}

int cmd_fit(const CommonOpts& o) {
  const ExperimentConfig cfg = load(o);
  const VelocityDataset data = dataset_for(cfg, o);
  for (PriorFamily family : cfg.arms()) {
    FitConfig fit_cfg;
    fit_cfg.adam.lr = cfg.opt.lr;
    fit_cfg.max_iters = cfg.opt.max_iters;
    fit_cfg.tol = cfg.opt.tol;
    const FitResult r =
        fit(cfg.init_spec(family).to_log(), family, data, fit_cfg);

    const std::string name = family_name(family);
    const std::string trace_path = out_file(cfg, name + "_lml_trace.csv");
    {
      std::ofstream os(trace_path);
      os << "iter,lml\n";
      for (std::size_t i = 0; i < r.lml_trace.size(); ++i)
        os << i << ',' << detail::fmt17(r.lml_trace[i]) << "\n";
    }
    const std::string fit_path = out_file(cfg, name + "_fit.txt");
    {
      std::ofstream os(fit_path);
      os << "family: " << name << "\n";
      os << "converged: " << (r.converged ? "true" : "false") << "\n";
      os << "iterations: " << r.iterations << "\n";
      os << "lml: " << detail::fmt17(r.lml_trace.back()) << "\n";
      os << "ell1: " << detail::fmt17(r.spec.ell1) << "\n";
      os << "sigma2_1: " << detail::fmt17(r.spec.sigma2_1) << "\n";
      os << "ell2: " << detail::fmt17(r.spec.ell2) << "\n";
      os << "sigma2_2: " << detail::fmt17(r.spec.sigma2_2) << "\n";
      os << "sigma2_obs: " << detail::fmt17(r.spec.sigma2_obs) << "\n";
    }
    std::printf("[%s] converged=%s iterations=%d lml=%.6f -> %s\n",
                name.c_str(), r.converged ? "yes" : "no", r.iterations,
                r.lml_trace.back(), fit_path.c_str());
  }
  return 0;
}

int cmd_predict(const CommonOpts& o) {
  ExperimentConfig cfg = load(o);
  cfg.pinned = true;  // predict uses the configured hyperparameters
  const VelocityDataset data = dataset_for(cfg, o);
  const std::optional<TruthGrid> truth =
      o.data_path.empty() ? truth_on_grid(cfg) : std::nullopt;
  const std::vector<Vec2> grid = cfg.test_grid.points();
  for (PriorFamily family : cfg.arms()) {
    const FieldPosterior post = predict(cfg.init_spec(family), data, grid,
                                        /*divergence=*/true,
                                        /*vorticity=*/true);
    const std::string path =
        out_file(cfg, std::string(family_name(family)) + "_grid.csv");
    write_grid_csv(path, post, truth);
    std::printf("[%s] wrote %zu grid rows to %s\n", family_name(family),
                grid.size(), path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Gaussian-process reconstruction of 2D current fields with "
      "Helmholtz-decomposed priors"};
  app.require_subcommand(0, 1);

  std::vector<int> bench;
  app.add_option("--benchmark-cost", bench,
                 "Measure the Helmholtz/velocity wall-clock cost ratio for M "
                 "training and N test points")
      ->expected(2);

  CommonOpts run_o, sim_o, fit_o, pred_o, ing_o;
  add_common(app.add_subcommand("run", "Full pipeline: data, fit, predict, "
                                       "metrics, output files"),
             run_o);
  add_common(app.add_subcommand("simulate", "Simulate buoys and write the "
                                            "dataset CSV"),
             sim_o);
  add_common(app.add_subcommand("fit", "Fit hyperparameters by maximizing "
                                       "the log marginal likelihood"),
             fit_o, true);
  add_common(app.add_subcommand("predict", "Posterior fields on the test "
                                           "grid at the configured "
                                           "hyperparameters"),
             pred_o, true);
  add_common(app.add_subcommand("ingest", "Parse and filter a drifter file "
                                          "into the dataset CSV"),
             ing_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (!bench.empty()) {
      const CostBenchmark r = cost_benchmark(bench[0], bench[1]);
      std::printf("M=%d N=%d helmholtz=%.3fs velocity=%.3fs ratio=%.2f\n",
                  r.m, r.n, r.helmholtz_seconds, r.velocity_seconds, r.ratio);
      return 0;
    }
    if (app.got_subcommand("run")) return cmd_run(run_o);
    if (app.got_subcommand("simulate")) return cmd_simulate(sim_o);
    if (app.got_subcommand("fit")) return cmd_fit(fit_o);
    if (app.got_subcommand("predict")) return cmd_predict(pred_o);
    if (app.got_subcommand("ingest")) return cmd_ingest(ing_o);
    std::cout << app.help();
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
