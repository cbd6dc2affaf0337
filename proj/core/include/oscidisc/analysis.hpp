#pragma once

#include "oscidisc/trajectory.hpp"

#include <optional>
#include <vector>

namespace oscidisc::analysis {

/// Times at which `signal - level` crosses zero upwards, linearly interpolated.
std::vector<double> upward_crossings(const Vector& times, const Vector& signal, double level);

/// Mean interval between upward crossings of the signal's midrange level.
/// Returns nullopt with fewer than two crossings.
std::optional<double> estimate_period(const Vector& times, const Vector& signal);

/// Symmetric Hausdorff distance between two point clouds (rows are points).
double hausdorff_distance(const Matrix& a, const Matrix& b);

/// Length of the diagonal of the bounding box of the rows.
double bounding_diameter(const Matrix& points);

/// Coefficient of determination of `predicted` against `observed`.
double r_squared(const Vector& observed, const Vector& predicted);

/// Row subsample with the given stride (always keeps row 0).
Matrix every_nth_row(const Matrix& m, Index stride);

}  // namespace oscidisc::analysis
