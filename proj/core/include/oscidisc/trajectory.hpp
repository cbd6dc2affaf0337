#pragma once

#include "oscidisc/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oscidisc {

/// Time-stamped samples of a state vector.
///
/// Rows of `states` (and `derivatives`, when present) correspond to entries of
/// `times`, which must be strictly increasing. `labels` names each column.
struct Trajectory {
  Vector times;
  Matrix states;
  std::optional<Matrix> derivatives;
  std::vector<std::string> labels;

  Index samples() const noexcept { return states.rows(); }
  Index dim() const noexcept { return states.cols(); }
  bool has_derivatives() const noexcept { return derivatives.has_value(); }

  /// Throws StructuralError when the invariants above do not hold.
  void validate() const;

  /// Rows [begin, end).
  Trajectory slice(Index begin, Index end) const;

  /// Samples with t >= t_from.
  Trajectory since(double t_from) const;

  /// Keeps the given columns, in order.
  Trajectory columns(const std::vector<Index>& cols) const;
};

/// Labels of the form prefix + (i + first).
std::vector<std::string> numbered_labels(const std::string& prefix, Index count,
                                         Index first = 0);

}  // namespace oscidisc
