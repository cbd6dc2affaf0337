#pragma once

#include "oscidisc/experiment/config.hpp"
#include "oscidisc/hybrid/hybrid_model.hpp"
#include "oscidisc/netsim/network.hpp"
#include "oscidisc/reduction/reduction.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace oscidisc::experiment {

/// A pipeline stage failed. `stage()` is one of simulate, reduce, trim, fit,
/// resimulate, compare, write.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct RunReport {
  std::filesystem::path output_dir;
  std::map<std::string, double> metrics;
  /// Discovered equations, one string per model.
  std::vector<std::string> models;
  std::vector<std::string> files;
};

/// Runs the configured pipeline and writes its artifacts into `output_dir`.
/// Sweeps are delegated to run_dimension_sweep with the configured trial
/// count and worker pool size.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir);

/// Simulated network with its observed, post-transient window.
struct NetworkRun {
  netsim::NetworkSpec spec;
  Trajectory observed;
  /// Kuramoto order parameter at the final state (0 without Kuramoto nodes).
  double order_parameter = 0.0;
};

/// Builds the network from the trial seed, integrates from a random initial
/// state and keeps the observed samples with t >= transient.
NetworkRun simulate_network(const NetworkSection& section, std::uint64_t trial_seed);

/// Global or block-wise reduction of a network window per the config.
reduction::Reduction reduce_network(const netsim::NetworkSpec& spec, const Trajectory& observed,
                                    const ReductionSection& section);

/// Symmetric Hausdorff distance with each source set thinned to at most
/// `max_points` rows; targets keep every row.
double cycle_distance(const Matrix& a, const Matrix& b, Index max_points = 2000);

/// Smallest distance between the first sample and any sample at least one
/// quarter of the window later, relative to the window's bounding diameter.
double recurrence_gap(const Matrix& states);

}  // namespace oscidisc::experiment
