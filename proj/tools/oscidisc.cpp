// Command-line front end: run, sweep, plot, validate.

#include "oscidisc/experiment/config.hpp"
#include "oscidisc/experiment/pipelines.hpp"
#include "oscidisc/experiment/plot.hpp"
#include "oscidisc/experiment/sweep.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace {

namespace ex = oscidisc::experiment;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kPipelineError = 3;

std::filesystem::path output_dir(const ex::ExperimentConfig& cfg, const std::string& flag) {
  return flag.empty() ? ex::resolve_output_dir(cfg) : std::filesystem::path(flag);
}

void print_report(const ex::RunReport& report) {
  std::cout << "output: " << report.output_dir.string() << '\n';
  for (const auto& [k, v] : report.metrics) std::cout << "  " << k << " = " << v << '\n';
  for (const auto& m : report.models) std::cout << m << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse model discovery for oscillator networks"};
  app.require_subcommand(1);

  std::string config_path, output_flag, plot_dir;
  int trials = 0, jobs = 0;
  bool svg = false;

  auto* run = app.add_subcommand("run", "Run the pipeline named in a config");
  run->add_option("config", config_path, "YAML config")->required();
  run->add_option("-o,--output", output_flag, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Run a dimension sweep");
  sweep->add_option("config", config_path, "YAML config")->required();
  sweep->add_option("--trials", trials, "Trials per cell (default from config)")->check(CLI::Range(2, 1 << 20));
  sweep->add_option("--jobs", jobs, "Worker threads (default from config)")->check(CLI::Range(1, 1024));
  sweep->add_option("-o,--output", output_flag, "Output directory");

  auto* plot = app.add_subcommand("plot", "Write plot-ready files for an output directory");
  plot->add_option("dir", plot_dir, "Experiment output directory")->required();
  plot->add_flag("--svg", svg, "Also render static SVG figures");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "YAML config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*plot) {
      for (const auto& p : ex::emit_plot_data(plot_dir, svg)) std::cout << p.string() << '\n';
      return kOk;
    }

    ex::ExperimentConfig cfg;
    try {
      cfg = ex::load_config(config_path);
    } catch (const ex::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    }

    if (*validate) {
      std::cout << config_path << ": valid " << ex::kind_name(cfg.kind) << " config\n";
      return kOk;
    }
    if (*sweep) {
      if (cfg.kind != ex::ExperimentKind::dimension_sweep) {
        std::cerr << "config error: experiment: sweep needs a dimension_sweep config\n";
        return kConfigError;
      }
      if (trials > 0) cfg.sweep.trials = trials;
      if (jobs > 0) cfg.sweep.jobs = jobs;
    }
    print_report(ex::run_experiment(cfg, output_dir(cfg, output_flag)));
    return kOk;
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "pipeline error: " << e.what() << '\n';
    return kPipelineError;
  }
}
