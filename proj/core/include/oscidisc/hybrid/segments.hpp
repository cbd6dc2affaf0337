#pragma once

#include "oscidisc/sindy/regression.hpp"
#include "oscidisc/trajectory.hpp"

#include <vector>

namespace oscidisc::hybrid {

/// Sample range [begin, end) sharing one fast/slow label.
struct Segment {
  Index begin = 0;
  Index end = 0;
  bool fast = false;

  Index size() const noexcept { return end - begin; }
  bool operator==(const Segment&) const = default;
};

/// Maximal runs of equal labels in `trimmed` (true = fast). Runs shorter than
/// `min_run` are absorbed into their neighbours, shortest first, earliest on
/// ties, until every run is long enough or a single run remains.
std::vector<Segment> segment_mask(const std::vector<bool>& trimmed, Index min_run = 3);

/// segment_mask over a trim result; checks its length against the trajectory.
std::vector<Segment> segment_trajectory(const Trajectory& traj, const sindy::TrimResult& trim,
                                        Index min_run = 3);

/// Per-sample fast flags after absorption.
std::vector<bool> segments_to_mask(const std::vector<Segment>& segments);

/// Number of fast segments.
Index count_fast(const std::vector<Segment>& segments);

}  // namespace oscidisc::hybrid
