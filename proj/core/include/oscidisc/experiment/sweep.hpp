#pragma once

#include "oscidisc/experiment/config.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace oscidisc::experiment {

struct TrialRecord {
  Index cell = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool blowup = false;
  /// One estimated dimension per threshold; empty after a blowup.
  std::vector<Index> dimensions;
};

struct SweepCell {
  std::vector<double> params;
  int trials = 0;
  int blowups = 0;
  bool failed = false;
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<double> thresholds;
  std::vector<SweepCell> cells;
  std::vector<TrialRecord> trials;
  std::uint64_t master_seed = 0;
  double wall_seconds = 0.0;
};

/// Row-major cartesian product of the axes (last axis fastest).
std::vector<std::vector<double>> sweep_grid(const std::vector<SweepAxis>& axes);

/// Seed of (cell, trial); with `force_same_seed` every trial of a cell reuses
/// trial 0's seed.
std::uint64_t trial_seed(std::uint64_t master, Index cell, int trial, bool force_same_seed = false);

/// Network section with one grid point applied.
NetworkSection apply_cell(const ExperimentConfig& config, const std::vector<double>& params);

/// Runs every (cell, trial) on a pool of `jobs` workers; results are ordered
/// by (cell, trial) regardless of completion order.
SweepResult run_dimension_sweep(const ExperimentConfig& config, int trials, int jobs);

/// Mean and sample standard deviation per threshold from a trial log.
void aggregate(SweepResult& result);

/// sweep.json, trials.csv and one heatmap_<threshold>.csv per threshold.
std::vector<std::filesystem::path> write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

/// Heat-map matrix for one threshold: rows follow the first axis, columns
/// the second (a single column for one-axis grids).
Matrix heatmap(const SweepResult& result, std::size_t threshold_index);

}  // namespace oscidisc::experiment
