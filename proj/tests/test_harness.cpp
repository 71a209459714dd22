#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helmgp/experiment.hpp"
#include "helmgp/grid_io.hpp"
#include "test_support.hpp"

using namespace helmgp;

namespace {

namespace fs = std::filesystem;

const std::string kRepo = HELMGP_REPO_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_pinned_config(const std::string& out_dir) {
  ExperimentConfig cfg = load_experiment_config(kRepo + "/configs/vortex.cfg");
  cfg.pinned = true;
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("the bundled vortex config parses to the documented experiment") {
  const ExperimentConfig cfg =
      load_experiment_config(kRepo + "/configs/vortex.cfg");
  CHECK(cfg.families == FamilySelection::Both);
  CHECK(cfg.ell1 == 1.0);
  CHECK(cfg.sigma2 == 0.369);
  CHECK(cfg.noise == 0.135);
  REQUIRE(std::holds_alternative<SimSource>(cfg.source));
  const SimSource& sim = std::get<SimSource>(cfg.source);
  CHECK(sim.kind == AnalyticField::Kind::Vortex);
  CHECK(sim.grid.nx == 17);
  CHECK(sim.grid.ny == 17);
  REQUIRE(sim.groups.size() == 1);
  CHECK(sim.groups[0].starts.size() == 4);
  CHECK(sim.groups[0].steps == 2);
  CHECK(cfg.test_grid.count() == 289);
  CHECK(cfg.opt.tol == 1e-4);
}

TEST_CASE("the duffing config carries two release groups") {
  const ExperimentConfig cfg =
      load_experiment_config(kRepo + "/configs/duffing_small.cfg");
  const SimSource& sim = std::get<SimSource>(cfg.source);
  REQUIRE(sim.groups.size() == 2);
  CHECK(sim.groups[0].starts.size() == 3);
  CHECK(sim.groups[0].steps == 2);
  CHECK(sim.groups[1].starts.size() == 4);
  CHECK(sim.groups[1].steps == 4);
  // 3*2 + 4*4 observations
  CHECK(acquire_data(cfg).size() == 22);
}

TEST_CASE("config parse errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_experiment_config(in);
  };
  CHECK_THROWS_AS(parse("prior.family = cubist\n"), ConfigError);
  CHECK_THROWS_AS(parse("data.source = simulate\n"), ConfigError);  // no sim.kind
  CHECK_THROWS_AS(parse("just some words\n"), ConfigError);
  CHECK_THROWS_AS(parse("sim.kind = vortex\nsim.grid.min = 1\n"), ConfigError);
}

TEST_CASE("config accepts comments, spacing, and point lists") {
  std::istringstream in(
      "# comment\n"
      "  prior.family = velocity   # trailing comment\n"
      "\n"
      "data.source = simulate\n"
      "sim.kind = vortex\n"
      "sim.grid.min = -1,-1\n"
      "sim.grid.max = 1,1\n"
      "sim.grid.res = 5,5\n"
      "sim.buoys = 0.1,0.2 ; 0.3,0.4\n"
      "sim.total_time = 1\n"
      "test_grid.min = -1,-1\n"
      "test_grid.max = 1,1\n"
      "test_grid.res = 3,3\n");
  const ExperimentConfig cfg = parse_experiment_config(in);
  CHECK(cfg.families == FamilySelection::Velocity);
  const SimSource& sim = std::get<SimSource>(cfg.source);
  REQUIRE(sim.groups[0].starts.size() == 2);
  CHECK(sim.groups[0].starts[1] == Vec2(0.3, 0.4));
}

TEST_CASE("grid csv: header plus one row per grid point") {
  FieldPosterior post;
  post.grid = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1)};
  post.mean_u = {1, 2, 3, 4};
  post.mean_v = {5, 6, 7, 8};
  post.var_u = {0.1, 0.2, 0.3, 0.4};
  post.var_v = {0.5, 0.6, 0.7, 0.8};
  std::ostringstream os;
  write_grid_csv(os, post);
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  REQUIRE(std::getline(is, line));
  CHECK(line == kGridHeader);
  while (std::getline(is, line)) {
    ++rows;
    // absent derived fields leave their columns empty but present
    CHECK(line.find(",,,") != std::string::npos);
    CHECK(std::count(line.begin(), line.end(), ',') == 15);
  }
  CHECK(rows == 4);
}

TEST_CASE("grid csv round-trips the posterior exactly") {
  auto rng = test::make_rng(51);
  VelocityDataset d;
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 8; ++i) {
    d.locations.push_back(test::random_point(rng));
    d.velocities.emplace_back(g(rng), g(rng));
  }
  const PriorSpec spec{PriorFamily::Helmholtz, 1.1, 0.9, 1.4, 0.7, 0.1};
  std::vector<Vec2> grid;
  for (int i = 0; i < 6; ++i) grid.push_back(test::random_point(rng));
  const FieldPosterior post = predict(spec, d, grid, true, true);

  TruthGrid truth;
  for (const Vec2& x : grid) {
    truth.u.push_back(g(rng));
    truth.v.push_back(g(rng));
    truth.divergence.push_back(g(rng));
    truth.vorticity.push_back(g(rng));
  }

  std::ostringstream os;
  write_grid_csv(os, post, truth);
  std::istringstream is(os.str());
  const GridFile back = read_grid_csv(is);

  REQUIRE(back.posterior.grid.size() == post.grid.size());
  for (std::size_t i = 0; i < post.grid.size(); ++i) {
    CHECK(back.posterior.grid[i] == post.grid[i]);
    CHECK(back.posterior.mean_u[i] == post.mean_u[i]);
    CHECK(back.posterior.var_v[i] == post.var_v[i]);
    CHECK(back.posterior.mean_div[i] == post.mean_div[i]);
    CHECK(back.posterior.var_div[i] == post.var_div[i]);
    CHECK(back.posterior.mean_vort[i] == post.mean_vort[i]);
    CHECK(back.posterior.var_vort[i] == post.var_vort[i]);
  }
  REQUIRE(back.truth.has_value());
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(back.truth->divergence[i] == truth.divergence[i]);
}

TEST_CASE("pinned hyperparameters skip the fit and leave a one-entry trace") {
  const std::string out = "/tmp/helmgp_test_pinned";
  fs::remove_all(out);
  const RunReport report = run_experiment(tiny_pinned_config(out));
  REQUIRE(report.arms.size() == 2);
  for (const ArmResult& arm : report.arms) {
    CHECK(arm.lml_trace.size() == 1);
    CHECK(arm.iterations == 0);
  }
}

TEST_CASE("identical configs produce byte-identical output files") {
  const std::string out_a = "/tmp/helmgp_test_det_a";
  const std::string out_b = "/tmp/helmgp_test_det_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  run_experiment(tiny_pinned_config(out_a));
  run_experiment(tiny_pinned_config(out_b));
  for (const char* name : {"dataset.csv", "helmholtz_grid.csv",
                           "velocity_grid.csv", "helmholtz_lml_trace.csv",
                           "report.txt"}) {
    CHECK(slurp(out_a + "/" + name) == slurp(out_b + "/" + name));
  }
}

TEST_CASE("both prior arms consume the identical dataset bytes") {
  const std::string out_h = "/tmp/helmgp_test_arm_h";
  const std::string out_v = "/tmp/helmgp_test_arm_v";
  fs::remove_all(out_h);
  fs::remove_all(out_v);
  ExperimentConfig helm = tiny_pinned_config(out_h);
  helm.families = FamilySelection::Helmholtz;
  ExperimentConfig velo = tiny_pinned_config(out_v);
  velo.families = FamilySelection::Velocity;
  run_experiment(helm);
  run_experiment(velo);
  CHECK(slurp(out_h + "/dataset.csv") == slurp(out_v + "/dataset.csv"));
}

TEST_CASE("every file referenced by the report exists and parses") {
  const std::string out = "/tmp/helmgp_test_report_refs";
  fs::remove_all(out);
  const RunReport report = run_experiment(tiny_pinned_config(out));
  CHECK_NOTHROW(read_dataset_csv_file(out + "/" + report.dataset_file));
  for (const ArmResult& arm : report.arms) {
    const GridFile g = read_grid_csv_file(out + "/" + arm.grid_file);
    CHECK(g.posterior.grid.size() == 289);
    CHECK(g.truth.has_value());
    const std::string trace = slurp(out + "/" + arm.trace_file);
    CHECK(trace.rfind("iter,lml\n", 0) == 0);
  }
  const std::string rep = slurp(out + "/" + report.report_file);
  CHECK(rep.find("arm.helmholtz.rmse_velocity:") != std::string::npos);
  CHECK(rep.find("seconds") == std::string::npos);  // timings stay out
}

TEST_CASE("a failing run removes its partial outputs") {
  const std::string out = "/tmp/helmgp_test_cleanup";
  fs::remove_all(out);
  ExperimentConfig cfg = tiny_pinned_config(out);
  cfg.pinned = false;
  cfg.opt.lr = 80.0;  // guaranteed optimizer divergence
  CHECK_THROWS_AS(run_experiment(cfg), NumericalError);
  CHECK_FALSE(fs::exists(out + "/dataset.csv"));
  CHECK_FALSE(fs::exists(out + "/helmholtz_grid.csv"));
  CHECK_FALSE(fs::exists(out + "/report.txt"));
}

TEST_CASE("ingest-backed experiment runs through the same pipeline") {
  std::istringstream in(
      "prior.family = helmholtz\n"
      "prior.pinned = true\n"
      "data.source = ingest\n"
      "ingest.path = " + kRepo + "/tests/fixtures/laser_like.csv\n"
      "ingest.downsample = 3\n"
      "test_grid.min = -87.65,28.65\n"
      "test_grid.max = -87.35,28.95\n"
      "test_grid.res = 4,4\n"
      "out.dir = /tmp/helmgp_test_ingest_run\n");
  ExperimentConfig cfg = parse_experiment_config(in);
  fs::remove_all(cfg.out_dir);
  const RunReport report = run_experiment(cfg);
  CHECK(report.observations == 57);
  REQUIRE(report.arms.size() == 1);
  CHECK_FALSE(report.arms[0].rmse_velocity.has_value());  // no analytic truth
  const GridFile g = read_grid_csv_file(cfg.out_dir + "/helmholtz_grid.csv");
  CHECK_FALSE(g.truth.has_value());
}
