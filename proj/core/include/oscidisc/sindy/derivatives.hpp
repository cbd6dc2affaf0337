#pragma once

#include "oscidisc/trajectory.hpp"

namespace oscidisc::sindy {

enum class DerivativeMethod { central_difference, smoothed };

struct DerivativeOptions {
  DerivativeMethod method = DerivativeMethod::central_difference;
  /// Moving-average width for `smoothed`; must be odd and ≥ 1.
  Index smoothing_width = 5;
  /// Relative tolerance when checking the grid is uniform.
  double uniform_tolerance = 1e-6;
};

/// Second-order central differences in the interior and second-order
/// one-sided stencils at both ends. Needs ≥ 3 samples on a uniform grid.
Matrix estimate_derivatives(const Trajectory& traj, DerivativeOptions options = {});

}  // namespace oscidisc::sindy
