#pragma once

#include "oscidisc/common.hpp"

#include <filesystem>
#include <vector>

namespace oscidisc::experiment {

/// An experiment directory lacks every artifact the plotter understands.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

/// Writes plot-ready CSVs (and SVGs when `svg` is set) next to the artifacts
/// found in `dir`:
///   phase_plane.csv        from trajectory.csv + trim_mask.csv (+ hybrid_model.json)
///   projection_U{i}_U{j}.csv from coordinates.csv
///   heatmap_<threshold>.csv  from sweep.json
/// Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& dir, bool svg = false);

}  // namespace oscidisc::experiment
