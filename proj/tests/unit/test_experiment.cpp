#include "oscidisc/experiment/config.hpp"
#include "oscidisc/experiment/pipelines.hpp"
#include "oscidisc/experiment/plot.hpp"
#include "oscidisc/experiment/sweep.hpp"
#include "oscidisc/io.hpp"
#include "oscidisc/rng.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

using namespace oscidisc;
using namespace oscidisc::experiment;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

const char* kSmallSweep = R"(
experiment: dimension_sweep
name: tiny
seed: 99
network:
  kuramoto: {count: 6, omega_mean: 0.6, omega_width: 0.5}
  fhn: {count: 0}
  coupling: {kuramoto: 4, fhn: 0.2}
  dt: 0.1
  t_end: 40
  transient: 20
  record_every: 2
reduction:
  thresholds: [0.9, 0.99]
sweep:
  total_nodes: 6
  trials: 3
  grid:
    - {param: n_kuramoto, values: [2, 6]}
    - {param: kuramoto_coupling, values: [0.5, 4]}
)";

const char* kSmallNetwork = R"(
experiment: network_reduce_fit
name: small
seed: 3
network:
  kuramoto: {count: 8}
  edge_probability: 0.5
  coupling: {kuramoto: 10}
  dt: 0.1
  t_end: 200
  transient: 100
  record_every: 5
reduction:
  rank: 2
sindy:
  lambda: 0.05
  library: {polynomial: 3}
)";

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

struct EnvGuard {
  explicit EnvGuard(const char* name) : name_(name) {
    if (const char* v = std::getenv(name)) old_ = v;
  }
  ~EnvGuard() {
    if (old_.empty()) {
      ::unsetenv(name_);
    } else {
      ::setenv(name_, old_.c_str(), 1);
    }
  }
  const char* name_;
  std::string old_;
};

}  // namespace

TEST(Config, ShippedConfigsValidate) {
  for (const auto& entry : fs::directory_iterator(testing_support::source_dir() / "configs")) {
    if (entry.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
  }
}

TEST(Config, ParsesNetworkSections) {
  const auto cfg = parse_config(kSmallNetwork);
  EXPECT_EQ(cfg.kind, ExperimentKind::network_reduce_fit);
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.network.recipe.kuramoto.count, 8);
  EXPECT_EQ(cfg.network.recipe.edge_probability, 0.5);
  EXPECT_EQ(cfg.network.recipe.coupling.kuramoto, 10.0);
  EXPECT_EQ(cfg.network.record_every, 5);
  EXPECT_EQ(cfg.reduction.rank, 2);
  EXPECT_EQ(cfg.sindy.lambda, 0.05);
  EXPECT_EQ(cfg.sindy.library.polynomial_degree, 3);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of("experiment: teleport\n"), "experiment");
  EXPECT_EQ(field_of("experiment: canonical_hybrid\ncanonical: {system: duffing}\n"), "canonical.system");
  EXPECT_EQ(field_of("experiment: network_reduce_fit\nnetwork: {kuramoto: {count: -3}}\n"),
            "network.kuramoto.count");
  EXPECT_EQ(field_of("experiment: network_reduce_fit\nnetwork: {warp: 1}\n"), "network.warp");
  EXPECT_EQ(field_of("experiment: network_reduce_fit\nnetwork: {kuramoto: {count: 4}}\nreduction: {convention: vibes}\n"), "reduction.convention");
  EXPECT_EQ(field_of("experiment: [unclosed\n"), "<document>");
  try {
    parse_config("experiment: canonical_hybrid\ncanonical: {system: duffing}\n");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown oscillator kind"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST(Config, OutputDirectoryOverride) {
  EnvGuard guard("OSCIDISC_OUTPUT_DIR");
  auto cfg = parse_config(kSmallNetwork);
  cfg.output_dir = "somewhere";
  ::unsetenv("OSCIDISC_OUTPUT_DIR");
  EXPECT_EQ(resolve_output_dir(cfg), fs::path("somewhere"));
  ::setenv("OSCIDISC_OUTPUT_DIR", "/tmp/elsewhere", 1);
  EXPECT_EQ(resolve_output_dir(cfg), fs::path("/tmp/elsewhere"));
}

TEST(Sweep, GridIsRowMajor) {
  const std::vector<SweepAxis> axes{{"a", {1, 2}}, {"b", {10, 20, 30}}};
  const auto grid = sweep_grid(axes);
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_EQ(grid[0], (std::vector<double>{1, 10}));
  EXPECT_EQ(grid[1], (std::vector<double>{1, 20}));
  EXPECT_EQ(grid[3], (std::vector<double>{2, 10}));
  EXPECT_EQ(grid[5], (std::vector<double>{2, 30}));
}

TEST(Sweep, TrialSeedsAreIndependentPerCell) {
  std::set<std::uint64_t> seen;
  for (Index c = 0; c < 20; ++c)
    for (int t = 0; t < 20; ++t) seen.insert(trial_seed(5, c, t));
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(trial_seed(5, 3, 7), trial_seed(5, 3, 7));
  EXPECT_NE(trial_seed(5, 3, 7), trial_seed(6, 3, 7));
  EXPECT_EQ(trial_seed(5, 3, 7, true), trial_seed(5, 3, 0));
}

TEST(Sweep, ApplyCellSetsParameters) {
  auto cfg = parse_config(kSmallSweep);
  const auto net = apply_cell(cfg, {2, 0.5});
  EXPECT_EQ(net.recipe.kuramoto.count, 2);
  EXPECT_EQ(net.recipe.fhn.count, 4);
  EXPECT_EQ(net.recipe.coupling.kuramoto, 0.5);
  EXPECT_THROW(apply_cell(cfg, {7, 0.5}), ArgumentError);
}

TEST(Sweep, ForcedSameSeedGivesZeroSpread) {
  auto cfg = parse_config(kSmallSweep);
  cfg.sweep.grid = {{"n_kuramoto", {6}}};
  cfg.sweep.force_same_seed = true;
  const auto result = run_dimension_sweep(cfg, 2, 1);
  ASSERT_EQ(result.cells.size(), 1u);
  for (double s : result.cells[0].stddev) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(result.trials[0].seed, result.trials[1].seed);
}

TEST(Sweep, AggregateMatchesTrialLog) {
  const auto cfg = parse_config(kSmallSweep);
  const auto result = run_dimension_sweep(cfg, 3, 2);
  ASSERT_EQ(result.cells.size(), 4u);
  ASSERT_EQ(result.trials.size(), 12u);
  TempDir dir;
  write_sweep_outputs(result, dir.path());
  const auto log = io::read_table_csv(dir / "trials.csv");
  ASSERT_EQ(log.rows.size(), 12u);
  const auto col = static_cast<std::size_t>(std::find(log.header.begin(), log.header.end(), "dim_0.99") -
                                            log.header.begin());
  ASSERT_LT(col, log.header.size());
  for (std::size_t c = 0; c < 4; ++c) {
    std::vector<double> xs;
    for (const auto& row : log.rows)
      if (row[0] == std::to_string(c) && row[3] == "0") xs.push_back(std::stod(row[col]));
    ASSERT_FALSE(xs.empty());
    double mean = 0.0;
    for (double x : xs) mean += x / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    EXPECT_NEAR(result.cells[c].mean[1], mean, 1e-12);
    EXPECT_NEAR(result.cells[c].stddev[1], sd, 1e-12);
    EXPECT_GE(result.cells[c].mean[1], 1.0);
    const double nk = result.cells[c].params[0];
    EXPECT_LE(result.cells[c].mean[1], nk + 2.0 * (6.0 - nk));
  }
  const auto heat = io::read_table_csv(dir / "heatmap_0.99.csv");
  EXPECT_EQ(heat.header, (std::vector<std::string>{"n_kuramoto\\kuramoto_coupling", "0.5", "4"}));
  EXPECT_EQ(heat.rows.size(), 2u);
  EXPECT_EQ(std::stod(heat.rows[1][2]), result.cells[3].mean[1]);
}

TEST(Sweep, ResultsIndependentOfWorkerCount) {
  const auto cfg = parse_config(kSmallSweep);
  const auto one = run_dimension_sweep(cfg, 2, 1);
  const auto three = run_dimension_sweep(cfg, 2, 3);
  ASSERT_EQ(one.trials.size(), three.trials.size());
  for (std::size_t k = 0; k < one.trials.size(); ++k) {
    EXPECT_EQ(one.trials[k].seed, three.trials[k].seed);
    EXPECT_EQ(one.trials[k].dimensions, three.trials[k].dimensions);
  }
  EXPECT_THROW(run_dimension_sweep(cfg, 1, 1), ArgumentError);
}

TEST(Pipeline, NetworkRunIsByteReproducible) {
  const auto cfg = parse_config(kSmallNetwork);
  TempDir a, b;
  const auto ra = run_experiment(cfg, a.path());
  run_experiment(cfg, b.path());
  for (const auto& name : {"trajectory.csv", "coordinates.csv", "singular_values.csv", "modes.csv", "model.json"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(testing_support::slurp(a / name), testing_support::slurp(b / name)) << name;
  }
  EXPECT_TRUE(fs::exists(a / "report.json"));
  EXPECT_EQ(ra.metrics.at("rank"), 2.0);
  EXPECT_LE(ra.metrics.at("max_active_terms"), 3.0);
}

TEST(Pipeline, RayleighHybridArtifacts) {
  const auto cfg = load_config(testing_support::source_dir() / "configs" / "rayleigh_hybrid.yaml");
  TempDir dir;
  const auto report = run_experiment(cfg, dir.path());
  for (const auto& name : {"trajectory.csv", "trim_mask.csv", "hybrid_model.json", "hybrid_sim.csv", "report.json"})
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  EXPECT_LT(report.metrics.at("cycle_period_rel_err"), 0.05);
  EXPECT_EQ(report.metrics.at("fast_segments_per_period") > 1.5, true);

  const auto files = emit_plot_data(dir.path());
  ASSERT_FALSE(files.empty());
  const auto phase = io::read_table_csv(dir / "phase_plane.csv");
  EXPECT_EQ(phase.header, (std::vector<std::string>{"x", "y", "label"}));
  std::set<std::string> labels;
  for (const auto& row : phase.rows) labels.insert(row[2]);
  EXPECT_TRUE(labels.contains("slow"));
  EXPECT_TRUE(labels.contains("fast_1"));
}

TEST(Plot, SweepHeatmapsAndEmptyDirectory) {
  const auto cfg = parse_config(kSmallSweep);
  TempDir dir;
  write_sweep_outputs(run_dimension_sweep(cfg, 2, 1), dir.path());
  fs::remove(dir / "heatmap_0.9.csv");
  const auto files = emit_plot_data(dir.path(), true);
  EXPECT_TRUE(fs::exists(dir / "heatmap_0.9.csv"));
  EXPECT_EQ(io::read_table_csv(dir / "heatmap_0.9.csv").rows.size(), 2u);

  TempDir empty;
  try {
    emit_plot_data(empty.path());
    FAIL() << "expected MissingArtifactError";
  } catch (const MissingArtifactError& e) {
    EXPECT_NE(std::string(e.what()).find("trajectory.csv"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("sweep.json"), std::string::npos);
  }
}

#ifdef OSCIDISC_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OSCIDISC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  TempDir dir;
  io::write_text(dir / "good.yaml", kSmallNetwork);
  io::write_text(dir / "bad.yaml", "experiment: network_reduce_fit\nnetwork: {kuramoto: {kind: quantum}}\n");
  std::string broken = kSmallNetwork;
  broken.replace(broken.find("rank: 2"), 7, "rank: 50");
  io::write_text(dir / "broken.yaml", broken);

  EXPECT_EQ(run_cli("validate " + (dir / "good.yaml").string()), 0);
  EXPECT_EQ(run_cli("validate " + (dir / "bad.yaml").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "bad.yaml").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "good.yaml").string() + " -o " + (dir / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
  EXPECT_EQ(run_cli("run " + (dir / "broken.yaml").string() + " -o " + (dir / "out2").string()), 3);
  EXPECT_EQ(run_cli("sweep " + (dir / "good.yaml").string()), 2);
  EXPECT_EQ(run_cli("plot " + (dir / "empty").string()), 3);
  EXPECT_EQ(run_cli("frobnicate"), 2);
}
#endif
